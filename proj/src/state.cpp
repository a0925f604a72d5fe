#include <vans/state.hpp>

namespace vans
{
  SolutionState::SolutionState(const FeSpace &vel, const FeSpace &pres)
    : velocity_space(&vel)
    , pressure_space(&pres)
    , dim(vel.dim())
  {
    if (pres.degree() > vel.degree())
      throw ConfigError("SolutionState: pressure degree exceeds velocity degree");
    const int n = n_dofs();
    x = Vector::Zero(n);
    prev1 = Vector::Zero(n);
    prev2 = Vector::Zero(n);
  }

  void SolutionState::push_history()
  {
    prev2 = prev1;
    prev1 = x;
  }

  void SolutionState::interpolate(const std::function<Vec3(const Vec3 &)> &velocity,
                                  const std::function<double(const Vec3 &)> &pressure)
  {
    for (int node = 0; node < velocity_space->n_dofs(); ++node)
      {
        const Vec3 u = velocity(velocity_space->support_point(node));
        for (int c = 0; c < dim; ++c)
          x[velocity_dof(node, c)] = u[c];
      }
    for (int node = 0; node < pressure_space->n_dofs(); ++node)
      x[pressure_dof(node)] = pressure(pressure_space->support_point(node));
  }
} // namespace vans
