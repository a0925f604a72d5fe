#ifndef VANS_VANS_SOLVER_HPP
#define VANS_VANS_SOLVER_HPP

#include <vans/boundary.hpp>
#include <vans/drag.hpp>
#include <vans/linear_solver.hpp>
#include <vans/state.hpp>
#include <vans/void_fraction.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vans
{
  // The two momentum formulations. They differ in whether the void fraction
  // multiplies the pressure gradient and viscous operator (form A) or is
  // absorbed into the interphase coupling (form B); the continuity equation
  // is shared.
  enum class VansForm
  {
    a,
    b
  };

  VansForm vans_form_from_string(const std::string &name);

  struct StabilizationSettings
  {
    bool supg = true;
    bool pspg = true;
    bool grad_div = true;
  };

  struct NewtonSettings
  {
    double tolerance = 1e-9;
    int max_iterations = 10;
    double relaxation = 1.0; // fixed under-relaxation of the update
  };

  struct VansConfig
  {
    VansForm form = VansForm::b;
    double viscosity = 1.0; // kinematic (m^2/s)
    double density = 1.0;   // fluid density; drag conversion and reported pressures only

    bool transient = false;
    BdfScheme bdf{1};
    double dt = 0.0;

    StabilizationSettings stabilization;
    NewtonSettings newton;
    LinearSettings linear;
    int n_threads = 1;

    // Body force per unit mass; enters the momentum residual as -eps*f.
    std::function<Vec3(const Vec3 &, double)> body_force;
    // Manufactured momentum source in residual units (m/s^2), form-matched.
    std::function<Vec3(const Vec3 &, double)> momentum_source;
    // Volumetric mass source (1/s) appearing in continuity and as +s*u in
    // momentum.
    std::function<double(const Vec3 &, double)> mass_source;
  };

  // Element stabilization time scale: transient runs combine the step,
  // convective, and diffusive limits
  //   tau = [ (1/dt)^2 + (2|u|/h_conv)^2 + 9 (4 nu/h_diff^2)^2 ]^(-1/2)
  // and stationary runs drop the step term. The convective length resolves
  // sub-cell transport of a degree-k interpolant, so it carries the 1/k
  // factor; the diffusive length is the plain cell scale. Splitting them
  // keeps the high-order pressure stabilization from collapsing to the
  // overly stiff tau ~ (h/k)^2/nu limit on refined meshes.
  double tau_velocity(bool transient, double dt, double u_norm, double h_conv, double h_diff,
                      double viscosity);

  // Grad-div penalty strength, gamma = nu + |u| h, with h the convective
  // element length.
  double grad_div_gamma(double u_norm, double h, double viscosity);

  // Convective element length entering tau and gamma: (cell measure)^(1/dim)
  // divided by the velocity degree.
  double element_length(const Mesh &mesh, int velocity_degree);

  // Diffusive element length entering tau: (cell measure)^(1/dim).
  double diffusive_length(const Mesh &mesh);

  // Assemble the stabilized residual (and optionally the Jacobian) of the
  // chosen form at state.x, state.time. Constrained rows are replaced by
  // x_i - g_i with an identity Jacobian row. The drag pointer may be null
  // (no particles). tau_reference, when given, supplies the velocity vector
  // from which tau and gamma are computed instead of state.x; the
  // finite-difference Jacobian oracle uses it to probe the residual with the
  // stabilization parameters held fixed, matching their frozen treatment in
  // the analytic Jacobian.
  void assemble_system(const SolutionState &state,
                       const VansConfig &config,
                       const VoidFractionData &void_fraction,
                       const std::vector<CellDrag> *drag,
                       const ConstraintSet &constraints,
                       Vector &residual,
                       SparseMatrix *jacobian,
                       const Vector *tau_reference = nullptr);

  struct NewtonReport
  {
    bool converged = false;
    int iterations = 0; // linear solves performed
    std::vector<double> residual_history;
  };

  // Nonconvergence carries the iterate history so callers can log or tolerate
  // it (bed sweep rows, the no-grad-div demo run).
  class NewtonFailure : public SolverError
  {
  public:
    NewtonFailure(const std::string &what, NewtonReport report_in)
      : SolverError(what)
      , report(std::move(report_in))
    {}

    NewtonReport report;
  };

  // Newton iteration on the assembled system: terminates when the l2 norm of
  // the constrained residual falls below the tolerance. Throws NewtonFailure
  // past max iterations and SolverError on NaN or runaway residuals.
  NewtonReport newton_solve(SolutionState &state,
                            const VansConfig &config,
                            const VoidFractionData &void_fraction,
                            const std::vector<CellDrag> *drag,
                            const ConstraintSet &constraints);

  // Stationary solve: build constraints at state.time, seed constrained
  // values, iterate.
  NewtonReport solve_stationary(SolutionState &state,
                                const VansConfig &config,
                                const VoidFractionData &void_fraction,
                                const std::vector<CellDrag> *drag,
                                const std::vector<VelocityBc> &bcs,
                                std::optional<std::pair<int, double>> pressure_pin = std::nullopt);

  // One implicit step: rotate history, advance time, rebuild constraints at
  // the new time, solve. Void-fraction history rotation stays with the
  // caller (the field may be static or analytic).
  NewtonReport advance_time_step(SolutionState &state,
                                 const VansConfig &config,
                                 const VoidFractionData &void_fraction,
                                 const std::vector<CellDrag> *drag,
                                 const std::vector<VelocityBc> &bcs,
                                 std::optional<std::pair<int, double>> pressure_pin = std::nullopt);

  // Elementwise integrals of the continuity equation
  //   d eps/dt + eps div u + u . grad eps - s
  // summed globally and maximized locally. Uses a generous quadrature so the
  // report reflects the fields, not integration error.
  struct MassConservationReport
  {
    double global_source = 0.0;
    double max_local_source = 0.0;
  };

  MassConservationReport mass_conservation_report(const SolutionState &state,
                                                  const VansConfig &config,
                                                  const VoidFractionData &void_fraction);

  // L2 norm of the continuity residual field over the domain (the grad-div
  // demo compares runs with and without the penalty).
  double continuity_residual_norm(const SolutionState &state,
                                  const VansConfig &config,
                                  const VoidFractionData &void_fraction);
} // namespace vans

#endif
