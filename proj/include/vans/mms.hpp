#ifndef VANS_MMS_HPP
#define VANS_MMS_HPP

#include <vans/vans_solver.hpp>

#include <string>
#include <vector>

namespace vans
{
  // A manufactured flow on [-1,1]^2: closed forms for every field the solver
  // consumes plus the residual-matched source terms of both momentum forms.
  // Cases:
  //   0  vortex velocity and sinusoidal pressure in a uniform void fraction
  //   1  the same flow with a sinusoidal void fraction (zero mass source)
  //   2  constant eps*u with exponential fields (zero mass source)
  //   3  time-periodic velocity and void fraction with a mass source
  struct MmsCase
  {
    int id = 0;
    bool time_dependent = false;
    double viscosity = 1.0;

    std::function<Vec3(const Vec3 &, double)> velocity;
    std::function<double(const Vec3 &, double)> pressure;
    std::function<double(const Vec3 &, double)> void_fraction;
    std::function<Vec3(const Vec3 &, double)> void_fraction_grad;
    std::function<double(const Vec3 &, double)> void_fraction_dt;
    std::function<double(const Vec3 &, double)> mass_source;
    std::function<Vec3(const Vec3 &, double)> momentum_source_a;
    std::function<Vec3(const Vec3 &, double)> momentum_source_b;
  };

  MmsCase mms_case(int id, double viscosity = 1.0);

  // Closed-form void fraction wired for the assembler (no nodal vector).
  VoidFractionData mms_void_fraction_data(const MmsCase &c);

  // Select the form-matched momentum source and the mass source.
  void apply_mms_sources(VansConfig &config, const MmsCase &c);

  // Exact velocity prescribed on all four faces.
  std::vector<VelocityBc> mms_boundary_conditions(const MmsCase &c);

  // Gauge fixing: pin the first pressure DoF to its exact value.
  std::pair<int, double> mms_pressure_pin(const MmsCase &c, const FeSpace &pressure_space,
                                          double time = 0.0);

  struct MmsErrorNorms
  {
    double velocity = 0.0;
    double pressure = 0.0;
  };

  // L2 errors against the closed forms at state.time.
  MmsErrorNorms mms_error_norms(const SolutionState &state, const MmsCase &c);

  struct MmsSolverOptions
  {
    double newton_tolerance = 1e-10;
    int newton_max_iterations = 20;
    // Verification sits on moderate 2D meshes where the sparse direct solve
    // is both fast and immune to the tight-tolerance stagnation a Krylov
    // method can hit near the discretization error floor.
    LinearSettings linear{LinearMethod::direct};
    int n_threads = 1;
  };

  struct MmsSolveResult
  {
    double h = 0.0; // velocity node spacing
    int dofs = 0;
    MmsErrorNorms errors;
    // Stationary: the report of the converged solution. Transient: worst
    // per-step values across the run.
    double mass_global = 0.0;
    double mass_local_max = 0.0;
    int newton_iterations = 0; // total linear solves
  };

  // Equal-order velocity/pressure elements are the default; the split-degree
  // overloads accept any pair with pressure degree <= velocity degree.
  MmsSolveResult solve_mms_stationary(const MmsCase &c,
                                      VansForm form,
                                      int n,
                                      int degree,
                                      const MmsSolverOptions &options = {});

  MmsSolveResult solve_mms_stationary(const MmsCase &c,
                                      VansForm form,
                                      int n,
                                      int velocity_degree,
                                      int pressure_degree,
                                      const MmsSolverOptions &options);

  // Implicit run to t_end with fixed dt; a second-order scheme bootstraps its
  // missing history with one first-order step. Errors at the final time.
  MmsSolveResult solve_mms_transient(const MmsCase &c,
                                     VansForm form,
                                     int n,
                                     int degree,
                                     int bdf_order,
                                     double dt,
                                     double t_end,
                                     const MmsSolverOptions &options = {});

  MmsSolveResult solve_mms_transient(const MmsCase &c,
                                     VansForm form,
                                     int n,
                                     int velocity_degree,
                                     int pressure_degree,
                                     int bdf_order,
                                     double dt,
                                     double t_end,
                                     const MmsSolverOptions &options);

  // Least-squares slope of log(error) against log(spacing).
  double fit_order(const std::vector<double> &spacing, const std::vector<double> &errors);

  struct ConvergenceRow
  {
    double spacing = 0.0; // h or dt
    int dofs = 0;
    MmsErrorNorms errors;
    double mass_global = 0.0;
  };

  struct ConvergenceStudy
  {
    std::vector<ConvergenceRow> rows;
    double order_velocity = 0.0;
    double order_pressure = 0.0;
  };

  ConvergenceStudy mms_spatial_study(const MmsCase &c,
                                     VansForm form,
                                     int degree,
                                     const std::vector<int> &meshes,
                                     const MmsSolverOptions &options = {});

  ConvergenceStudy mms_spatial_study(const MmsCase &c,
                                     VansForm form,
                                     int velocity_degree,
                                     int pressure_degree,
                                     const std::vector<int> &meshes,
                                     const MmsSolverOptions &options);

  ConvergenceStudy mms_temporal_study(const MmsCase &c,
                                      VansForm form,
                                      int n,
                                      int degree,
                                      int bdf_order,
                                      const std::vector<double> &dts,
                                      double t_end,
                                      const MmsSolverOptions &options = {});

  ConvergenceStudy mms_temporal_study(const MmsCase &c,
                                      VansForm form,
                                      int n,
                                      int velocity_degree,
                                      int pressure_degree,
                                      int bdf_order,
                                      const std::vector<double> &dts,
                                      double t_end,
                                      const MmsSolverOptions &options);

  // Viscosity that keeps a spatial study inside its asymptotic range on the
  // 16..64 mesh family. The manufactured flows have O(1) velocity, so the
  // diffusive balance has to be retuned per case, form, and element degree;
  // higher-order elements resolve so well that the asymptotic window sits at
  // a much lower viscosity than for linear elements. Unlisted combinations
  // fall back to 1.0.
  double mms_study_viscosity(int case_id, VansForm form, int velocity_degree);

  // CSV writers. Spatial: h,dofs,err_u_l2,err_p_l2. Temporal: dt,err_u_l2,
  // err_p_l2. Both end with a "# order,<velocity>,<pressure>" footer.
  void write_spatial_csv(const std::string &path, const ConvergenceStudy &study);
  void write_temporal_csv(const std::string &path, const ConvergenceStudy &study);
} // namespace vans

#endif
