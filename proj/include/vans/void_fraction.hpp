#ifndef VANS_VOID_FRACTION_HPP
#define VANS_VOID_FRACTION_HPP

#include <vans/fe_space.hpp>
#include <vans/linear_solver.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vans
{
  struct ParticleSet
  {
    std::vector<Vec3> position;
    std::vector<double> radius;
    std::vector<Vec3> velocity;

    int size() const { return static_cast<int>(position.size()); }

    void add(const Vec3 &x, double r, const Vec3 &v = Vec3::Zero())
    {
      position.push_back(x);
      radius.push_back(r);
      velocity.push_back(v);
    }
  };

  // Column schema: x,y,z,r,vx,vy,vz. Lines starting with '#' and a single
  // non-numeric header line are skipped.
  ParticleSet particles_from_csv(const std::string &path);
  void particles_to_csv(const ParticleSet &particles, const std::string &path);

  // Particle volume by mesh dimension (area in 2D).
  double particle_volume(double radius, int dim);

  // Centroid-binned void fraction per cell: each particle's full volume is
  // charged to the cell owning its centroid (half-open ownership); the raw
  // cell value is clamped at zero from below. Particles outside the box are
  // skipped but counted.
  struct PcmResult
  {
    std::vector<double> cell_values;
    int n_outside = 0;
    double binned_solid_volume = 0.0;
  };

  PcmResult pcm_cell_values(const Mesh &mesh, const ParticleSet &particles);

  // Projection system (M + L^2 K) eps = b for the piecewise-constant cell
  // data; K enters the left-hand side only, so the right-hand side mass
  // is conserved for any smoothing length.
  struct ProjectionSystem
  {
    const FeSpace *space = nullptr;
    SparseMatrix A;
    Vector b;
    double rhs_mass = 0.0; // sum of f_c * cell volume
  };

  ProjectionSystem build_projection_system(const FeSpace &space,
                                           const std::vector<double> &cell_values,
                                           double smoothing_length_sq);

  // Unbounded smoothed L2 projection (SPD solve, relative residual 1e-12).
  Vector project_void_fraction(const ProjectionSystem &system);

  // Primal-dual active set solve of the bound-constrained projection
  //   min 1/2 eps^T A eps - b^T eps  s.t.  lo <= eps <= hi,
  // supported for degree-1 spaces. The iteration stops when the active set
  // repeats; the KKT residual combines the free-node equation residual
  // (relative to ||b||_inf), wrong-signed multipliers on active nodes, and
  // bound violations.
  struct ActiveSetResult
  {
    Vector values;
    int iterations = 0;
    double kkt_residual = 0.0;
    int n_active_lower = 0;
    int n_active_upper = 0;
  };

  ActiveSetResult bound_void_fraction(const ProjectionSystem &system,
                                      double lower_bound,
                                      double upper_bound,
                                      int max_iterations = 50,
                                      double kkt_tolerance = 1e-10);

  // Integral of the FE field over the mesh (quadrature-exact).
  double field_integral(const FeSpace &space, const Vector &values);

  // End-to-end pipeline: PCM binning, smoothed projection, optional bounding.
  struct VoidFractionOptions
  {
    double smoothing_length_sq = 0.0;
    bool bound = false;
    double lower_bound = 0.36;
    double upper_bound = 1.0;
  };

  struct VoidFractionResult
  {
    Vector values;
    PcmResult pcm;
    double rhs_mass = 0.0;             // mass of the projected cell data
    double projected_mass = 0.0;       // integral of the unbounded projection
    double bounded_mass = 0.0;         // integral after bounding (== projected when off)
    double bounding_mass_defect = 0.0; // |bounded - projected| / |projected|
    int active_set_iterations = 0;
    double kkt_residual = 0.0;
    int n_active_lower = 0;
    int n_active_upper = 0;
    double min_value = 0.0;
    double max_value = 0.0;
  };

  VoidFractionResult compute_void_fraction(const FeSpace &space,
                                           const ParticleSet &particles,
                                           const VoidFractionOptions &options);

  // Void-fraction data as the flow assembler consumes it. The time
  // derivative is either identically zero (static beds), the analytic
  // derivative evaluated pointwise (manufactured solutions), or the BDF
  // combination of the stored nodal histories.
  enum class EpsDtMode
  {
    zero,
    analytic,
    bdf
  };

  struct VoidFractionData
  {
    const FeSpace *space = nullptr;
    Vector values;
    Vector prev1;
    Vector prev2;
    EpsDtMode dt_mode = EpsDtMode::zero;
    std::function<double(const Vec3 &, double)> dt_analytic;

    // When set, the assembler evaluates the void fraction and its gradient
    // from these closed forms instead of interpolating the nodal vector
    // (manufactured-solution runs, where the field is known exactly).
    std::function<double(const Vec3 &, double)> analytic_value;
    std::function<Vec3(const Vec3 &, double)> analytic_grad;

    bool analytic() const { return static_cast<bool>(analytic_value); }

    static VoidFractionData constant(const FeSpace &space, double value);
    void push_history();
  };

  // 1D step profile along x: 1 outside (-0.5, 0.5), 0.5 inside (boundaries
  // belong to the dense region).
  double step_void_fraction(const Vec3 &p);
} // namespace vans

#endif
