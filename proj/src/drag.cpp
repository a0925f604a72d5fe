#include <vans/drag.hpp>

#include <cmath>

namespace vans
{
  DragModel drag_model_from_string(const std::string &name)
  {
    if (name == "none")
      return DragModel::none;
    if (name == "difelice")
      return DragModel::difelice;
    if (name == "rong")
      return DragModel::rong;
    throw ConfigError("unknown drag model '" + name + "' (expected none, difelice or rong)");
  }

  double particle_reynolds(double rho_f, double eps, double slip_norm, double diameter, double mu_f)
  {
    if (mu_f <= 0.0)
      throw DomainError("particle_reynolds: viscosity must be positive");
    return rho_f * eps * slip_norm * diameter / mu_f;
  }

  namespace
  {
    double dallavalle_cd(double re)
    {
      const double c = 0.63 + 4.8 / std::sqrt(re);
      return c * c;
    }

    // Gaussian bump shared by both exponent fits.
    double log_re_bump(double re)
    {
      const double a = 1.5 - std::log10(re);
      return std::exp(-0.5 * a * a);
    }

    void check_cd_arguments(double re, double eps)
    {
      if (re <= 0.0)
        throw DomainError("drag coefficient: Reynolds number must be positive");
      if (eps <= 0.0)
        throw DomainError("drag coefficient: void fraction must be positive");
    }
  } // namespace

  double cd_difelice(double re, double eps)
  {
    check_cd_arguments(re, eps);
    const double chi = 3.7 - 0.65 * log_re_bump(re);
    return dallavalle_cd(re) * std::pow(eps, 2.0 - chi);
  }

  double cd_rong(double re, double eps)
  {
    check_cd_arguments(re, eps);
    const double chi = 2.65 * (eps + 1.0) - (5.3 - 3.5 * eps) * eps * eps * log_re_bump(re);
    return dallavalle_cd(re) * std::pow(eps, 2.0 - chi);
  }

  namespace
  {
    // Interpolate one solution field (velocity components or void fraction) at
    // a point that is already located in a cell.
    Vec3 velocity_at(const SolutionState &state,
                     const Lagrange1d &basis_1d,
                     int cell,
                     const Vec3 &ref,
                     std::vector<double> &value,
                     std::vector<Vec3> &grad,
                     std::vector<double> &laplace)
    {
      const FeSpace &space = *state.velocity_space;
      tensor_basis_at(basis_1d, space.dim(), ref, space.mesh().cell_size, value, grad, laplace);
      const auto &dofs = space.cell_dofs(cell);
      Vec3 u = Vec3::Zero();
      for (size_t j = 0; j < dofs.size(); ++j)
        for (int c = 0; c < state.dim; ++c)
          u[c] += state.x[state.velocity_dof(dofs[j], c)] * value[j];
      return u;
    }

    double scalar_at(const FeSpace &space,
                     const Vector &coeffs,
                     const Lagrange1d &basis_1d,
                     int cell,
                     const Vec3 &ref,
                     std::vector<double> &value,
                     std::vector<Vec3> &grad,
                     std::vector<double> &laplace)
    {
      tensor_basis_at(basis_1d, space.dim(), ref, space.mesh().cell_size, value, grad, laplace);
      const auto &dofs = space.cell_dofs(cell);
      double v = 0.0;
      for (size_t j = 0; j < dofs.size(); ++j)
        v += coeffs[dofs[j]] * value[j];
      return v;
    }

    std::vector<double> cell_average(const FeSpace &space, const Vector &coeffs)
    {
      const Mesh &mesh = space.mesh();
      const QuadratureRule rule = gauss_rule(mesh.dim, space.degree() + 1);
      const BasisTable basis = build_basis_table(mesh.dim, space.degree(), rule, mesh.cell_size);

      std::vector<double> avg(mesh.n_cells(), 0.0);
      for (int c = 0; c < mesh.n_cells(); ++c)
        {
          const auto &dofs = space.cell_dofs(c);
          double sum = 0.0;
          for (int q = 0; q < rule.size(); ++q)
            {
              double v = 0.0;
              for (size_t j = 0; j < dofs.size(); ++j)
                v += coeffs[dofs[j]] * basis.value[q][j];
              sum += rule.weights[q] * v;
            }
          avg[c] = sum; // reference weights sum to one
        }
      return avg;
    }
  } // namespace

  std::vector<CellDrag> build_cell_drag(const ParticleSet &particles,
                                        const SolutionState &state,
                                        const VoidFractionData &void_fraction,
                                        const DragSettings &settings)
  {
    const Mesh &mesh = state.velocity_space->mesh();
    std::vector<CellDrag> cells(mesh.n_cells());
    if (settings.model == DragModel::none || particles.size() == 0)
      return cells;

    if (&void_fraction.space->mesh() != &mesh)
      throw ConfigError("build_cell_drag: velocity and void fraction live on different meshes");
    if (settings.rho_f <= 0.0 || settings.mu_f <= 0.0)
      throw ConfigError("build_cell_drag: fluid density and viscosity must be positive");

    const Lagrange1d velocity_basis(state.velocity_space->degree());
    const Lagrange1d eps_basis(void_fraction.space->degree());
    std::vector<double> value;
    std::vector<Vec3> grad;
    std::vector<double> laplace;

    std::vector<double> strength(mesh.n_cells(), 0.0);
    std::vector<Vec3> weighted_velocity(mesh.n_cells(), Vec3::Zero());

    for (int p = 0; p < particles.size(); ++p)
      {
        const int cell = mesh.locate_cell(particles.position[p]);
        if (cell < 0)
          continue;
        const Vec3 ref = mesh.reference_coords(cell, particles.position[p]);

        const Vec3 u_f = velocity_at(state, velocity_basis, cell, ref, value, grad, laplace);
        const double eps =
          scalar_at(*void_fraction.space, void_fraction.values, eps_basis, cell, ref, value, grad, laplace);

        const Vec3 slip = u_f - particles.velocity[p];
        const double slip_norm = slip.norm();
        const double d_p = 2.0 * particles.radius[p];
        const double re = particle_reynolds(settings.rho_f, eps, slip_norm, d_p, settings.mu_f);
        if (re < 1e-12)
          continue;

        const double cd =
          (settings.model == DragModel::difelice) ? cd_difelice(re, eps) : cd_rong(re, eps);
        const double area = M_PI * particles.radius[p] * particles.radius[p];
        const double s = 0.5 * cd * area * slip_norm;

        strength[cell] += s;
        weighted_velocity[cell] += s * particles.velocity[p];
      }

    std::vector<double> eps_avg;
    if (settings.scale_by_inverse_void_fraction)
      eps_avg = cell_average(*void_fraction.space, void_fraction.values);

    for (int c = 0; c < mesh.n_cells(); ++c)
      {
        if (strength[c] <= 0.0)
          continue;
        double coefficient = strength[c] / mesh.cell_measures[c];
        if (settings.scale_by_inverse_void_fraction)
          {
            if (eps_avg[c] <= 0.0)
              throw DomainError("build_cell_drag: non-positive cell void fraction");
            coefficient /= eps_avg[c];
          }
        cells[c].coefficient = coefficient;
        cells[c].reference_velocity = weighted_velocity[c] / strength[c];
      }
    return cells;
  }
} // namespace vans
