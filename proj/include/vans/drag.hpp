#ifndef VANS_DRAG_HPP
#define VANS_DRAG_HPP

#include <vans/state.hpp>
#include <vans/types.hpp>
#include <vans/void_fraction.hpp>

#include <string>
#include <vector>

namespace vans
{
  enum class DragModel
  {
    none,
    difelice,
    rong
  };

  DragModel drag_model_from_string(const std::string &name);

  // Particle Reynolds number built on the superficial slip velocity
  // eps * |u_f - u_p|.
  double particle_reynolds(double rho_f, double eps, double slip_norm, double diameter, double mu_f);

  // Drag coefficient closures. Both share the Dallavalle single-particle
  // curve (0.63 + 4.8/sqrt(Re))^2 and correct for the surrounding void
  // fraction with a factor eps^(2 - chi); they differ in the exponent chi.
  double cd_difelice(double re, double eps);
  double cd_rong(double re, double eps);

  struct DragSettings
  {
    DragModel model = DragModel::none;
    double rho_f = 1.0;
    double mu_f = 1e-5;
    // When set, the cell coefficient is divided by the cell-average void
    // fraction. Used by the formulation whose momentum equation carries the
    // interphase force per unit fluid volume instead of per unit total volume.
    bool scale_by_inverse_void_fraction = false;
  };

  // Linearized per-cell drag reaction: each cell contributes
  //   coefficient * (u(x) - reference_velocity)
  // to the momentum residual (kinematic units, m/s^2). The coefficient bundles
  //   sum_p 1/2 * C_D,p * pi r_p^2 * |u_f,p - u_p| / V_cell
  // with slip magnitudes taken from the velocity passed to the builder, so in
  // a Newton loop the velocity Jacobian of the reaction is exactly
  // coefficient * I.
  struct CellDrag
  {
    double coefficient = 0.0; // 1/s
    Vec3 reference_velocity = Vec3::Zero();
  };

  // One entry per mesh cell. Velocity is interpolated from state.x at each
  // particle position; the void fraction field supplies eps both at particle
  // positions (Reynolds number, C_D) and as the cell average (optional inverse
  // scaling). Particles outside the mesh are ignored.
  std::vector<CellDrag> build_cell_drag(const ParticleSet &particles,
                                        const SolutionState &state,
                                        const VoidFractionData &void_fraction,
                                        const DragSettings &settings);
} // namespace vans

#endif
