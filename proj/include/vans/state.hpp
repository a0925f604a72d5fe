#ifndef VANS_STATE_HPP
#define VANS_STATE_HPP

#include <vans/fe_space.hpp>

#include <functional>

namespace vans
{
  // Backward differentiation formulas used for time derivatives. The
  // coefficients act on (current, prev1, prev2) and are divided by dt:
  //   BDF1: ( 1, -1,  0 ) / dt
  //   BDF2: ( 3/2, -2, 1/2 ) / dt
  // They sum to zero, so constants have an exactly vanishing derivative.
  struct BdfScheme
  {
    int order = 1;

    explicit BdfScheme(int order_in = 1)
      : order(order_in)
    {
      if (order < 1 || order > 2)
        throw ConfigError("BdfScheme: order must be 1 or 2");
    }

    std::array<double, 3> coefficients(double dt) const
    {
      if (dt <= 0.0)
        throw ConfigError("BdfScheme: dt must be positive");
      if (order == 1)
        return {1.0 / dt, -1.0 / dt, 0.0};
      return {1.5 / dt, -2.0 / dt, 0.5 / dt};
    }

    double derivative(double dt, double cur, double prev1, double prev2 = 0.0) const
    {
      const auto c = coefficients(dt);
      return c[0] * cur + c[1] * prev1 + c[2] * prev2;
    }
  };

  // Monolithic flow state: velocity DoFs first (node-major, component-minor),
  // then pressure DoFs. Two history levels support BDF2.
  struct SolutionState
  {
    const FeSpace *velocity_space = nullptr;
    const FeSpace *pressure_space = nullptr;
    int dim = 0;

    Vector x;      // current solution
    Vector prev1;  // one step back
    Vector prev2;  // two steps back
    double time = 0.0;

    SolutionState() = default;
    SolutionState(const FeSpace &vel, const FeSpace &pres);

    int n_velocity_dofs() const { return velocity_space->n_dofs() * dim; }
    int n_pressure_dofs() const { return pressure_space->n_dofs(); }
    int n_dofs() const { return n_velocity_dofs() + n_pressure_dofs(); }

    int velocity_dof(int node, int component) const { return node * dim + component; }
    int pressure_dof(int node) const { return n_velocity_dofs() + node; }

    // Rotate history before taking a step: prev2 <- prev1 <- current.
    void push_history();

    // Nodal interpolation of analytic velocity/pressure into the current
    // vector (initial conditions, manufactured solutions).
    void interpolate(const std::function<Vec3(const Vec3 &)> &velocity,
                     const std::function<double(const Vec3 &)> &pressure);
  };
} // namespace vans

#endif
