#ifndef VANS_PACKED_BED_HPP
#define VANS_PACKED_BED_HPP

#include <vans/vans_solver.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vans
{
  // Desk-scale packed-bed validation: a rectangular duct with slip walls,
  // inlet at z-min, natural outflow at z-max, and a static sphere packing
  // occupying a band of the duct. The simulated pressure drop across the
  // packing is compared against the Ergun correlation.
  struct BedConfig
  {
    Vec3 duct_lower = Vec3::Zero();
    Vec3 duct_upper = Vec3(0.010, 0.010, 0.060); // m
    std::array<int, 3> subdivisions{5, 5, 30};

    double particle_diameter = 1e-3; // m
    double particle_density = 2500.0; // kg/m^3
    double target_void_fraction = 0.5;
    double packing_z_min = 0.010; // m
    double packing_z_max = 0.050; // m
    std::uint64_t seed = 42;

    std::vector<double> inlet_velocities{0.05, 0.10, 0.15, 0.20, 0.25, 0.30}; // m/s
    double rho_f = 1.0;  // kg/m^3
    double mu_f = 1e-5;  // Pa s
    double gravity = 9.81; // correlation input only

    VansForm form = VansForm::b;
    DragModel drag = DragModel::rong;

    bool bound_void_fraction = false;
    double bound_lower = 0.36;
    double bound_upper = 1.0;
    double smoothing_length_sq = -1.0; // < 0: default 0.25 d_p^2

    double dt = 2e-3;  // s
    double t_end = 0.5; // s
    double steady_rel_tol = 1e-5; // on the step-to-step pressure drop change

    NewtonSettings newton;
    LinearSettings linear;

    double sample_z_low = -1.0;  // < 0: midway between inlet and packing
    double sample_z_high = -1.0; // < 0: midway between packing and outlet

    int velocity_degree = 1;
    int pressure_degree = 1;
    int n_threads = 1;
  };

  // Smoothing length actually used for the projection.
  double bed_smoothing_length_sq(const BedConfig &config);

  // Deterministic jittered simple-cubic packing across the packing band.
  // The particle count comes from the target void fraction by volume
  // bookkeeping; per-axis jitter is capped at 20% of the lattice spacing and
  // at the no-overlap headroom (spacing - d)/2. Targets denser than the
  // simple-cubic limit 1 - pi/6 are rejected.
  ParticleSet generate_packing(const BedConfig &config);

  // Void fraction implied by the particle count, 1 - n_p v_p / V_pack.
  double packing_void_fraction(const BedConfig &config, int n_particles);

  // Bed height consistent with the same bookkeeping,
  // H_b = n_p v_p / ((1 - eps) A_duct).
  double packing_bed_height(const BedConfig &config, int n_particles, double void_fraction);

  // Ergun correlation in Pa. The inertial term is quadratic in the
  // superficial velocity by default; the printed linear variant is kept
  // selectable for comparison.
  double ergun_pressure_drop(double void_fraction,
                             double superficial_velocity,
                             double mu_f,
                             double rho_f,
                             double bed_height,
                             double particle_diameter,
                             bool quadratic_inertial = true);

  // Wen & Yu minimum fluidization velocity and the Archimedes number it is
  // built from.
  struct WenYuResult
  {
    double u_mf = 0.0;
    double ar = 0.0;
  };

  WenYuResult wen_yu_umf(double rho_f, double rho_p, double particle_diameter, double mu_f, double g);

  // Area-averaged pressure (in Pa, physical units) on the horizontal plane
  // at z_low minus the one at z_high.
  double measure_pressure_drop(const SolutionState &state,
                               double rho_f,
                               double z_low,
                               double z_high);

  struct BedRow
  {
    double u_in = 0.0;
    double re_bed = 0.0;
    double dp_sim = 0.0;
    double dp_ergun = 0.0;
    double mass_global = 0.0;    // scaled by the inlet velocity
    double mass_local_max = 0.0; // scaled by the inlet velocity
    bool converged = true;
    int steps = 0;
  };

  struct BedReport
  {
    std::vector<BedRow> rows;
    int n_particles = 0;
    double achieved_void_fraction = 0.0;
    double bed_height = 0.0;
    double u_mf = 0.0;
    double archimedes = 0.0;
    // Projection mass bookkeeping for the bounding diagnostics: relative
    // mismatch between the field integral and the projected cell data, for
    // the run's field and for the unbounded projection.
    double mass_defect = 0.0;
    double unbounded_mass_defect = 0.0;
    std::vector<std::string> warnings;
  };

  // Called after each converged (or flagged) row with the final state and
  // the void-fraction data, so drivers can dump fields.
  using BedRowCallback =
    std::function<void(const BedRow &, const SolutionState &, const VoidFractionData &)>;

  // Full sweep: packing, void-fraction pipeline, one transient run per inlet
  // velocity integrated until the pressure drop settles (relative change
  // below steady_rel_tol) or t_end is reached. Nonconvergence flags the row
  // and the sweep continues.
  BedReport run_bed_sweep(const BedConfig &config, const BedRowCallback &on_row = {});

  // CSV with header u_in,re_bed,dp_sim,dp_ergun,mass_global,mass_local_max.
  void write_bed_csv(const BedReport &report, const std::string &path);
} // namespace vans

#endif
