#ifndef VANS_STEP_DEMO_HPP
#define VANS_STEP_DEMO_HPP

#include <vans/boundary.hpp>
#include <vans/vans_solver.hpp>
#include <vans/void_fraction.hpp>

#include <functional>

namespace vans
{
  // Flow through a square section whose void fraction steps from 1 to 0.5 and
  // back along x. The interpolated profile drops within one cell, and the
  // resulting velocity jump (mass balance forces u = u_in/eps on the dense
  // strip) shocks the discrete field. The demo solves the identical problem
  // with and without grad-div and reports how much spurious oscillation
  // survives in each case.
  struct StepDemoConfig
  {
    // Cells per direction on [-1,1]^2; a multiple of 4 puts the step edges on
    // mesh lines so the interpolated profile is the same one-cell ramp at any
    // resolution.
    int subdivisions = 32;
    int velocity_degree = 1;
    int pressure_degree = 1;

    double viscosity = 1e-2; // kinematic (m^2/s)
    double inlet_speed = 1.0;
    VansForm form = VansForm::b;

    // Override: constant void fraction of 1. Both stabilization variants then
    // reproduce the uniform inlet flow exactly.
    bool uniform_void_fraction = false;

    NewtonSettings newton{1e-9, 50, 1.0};
    LinearSettings linear;
    int n_threads = 1;
  };

  struct StepRunMetrics
  {
    bool converged = false;
    int iterations = 0;
    // L2 norm of the continuity residual field over the whole domain.
    double continuity_residual = 0.0;
    // Largest u_x excess over the dense-strip mass-balance value u_in/eps.
    double overshoot = 0.0;
    // Area of dense-strip cells where u_x deviates from the mass-balance
    // value by more than 2 percent (how far the oscillations reach).
    double oscillation_extent = 0.0;
  };

  struct StepDemoResult
  {
    StepRunMetrics with_grad_div;
    StepRunMetrics without_grad_div;
  };

  // Called after each of the two solves with the final state (last iterate if
  // the run stalled) so callers can dump fields.
  using StepRunCallback = std::function<void(bool grad_div_enabled,
                                             const SolutionState &state,
                                             const VoidFractionData &eps_data)>;

  StepDemoResult run_step_demo(const StepDemoConfig &config, const StepRunCallback &on_run = {});
} // namespace vans

#endif
