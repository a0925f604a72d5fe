#ifndef VANS_BOUNDARY_HPP
#define VANS_BOUNDARY_HPP

#include <vans/state.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace vans
{
  enum class BcKind
  {
    dirichlet, // all velocity components prescribed
    slip,      // impenetrable wall: normal component fixed to zero
    outflow    // natural (do nothing)
  };

  struct VelocityBc
  {
    int tag = -1;
    BcKind kind = BcKind::outflow;
    // Prescribed velocity for Dirichlet faces; may be time dependent.
    std::function<Vec3(const Vec3 &, double)> value;
  };

  // Row constraints applied to the monolithic system: constrained DoFs carry a
  // prescribed value; the Jacobian row becomes the identity and the residual
  // entry x_i - g_i, so a Newton update restores the prescribed value exactly.
  class ConstraintSet
  {
  public:
    void clear(int n_dofs);

    // Dirichlet wins over slip wherever a DoF is claimed by both (edges).
    void add(int dof, double value, bool strong = true);

    bool constrained(int dof) const { return flags_[dof] != 0; }
    double value(int dof) const { return values_[dof]; }
    const std::vector<int> &constrained_dofs() const { return dofs_; }

    // Overwrite constrained entries of a vector with prescribed values.
    void enforce(Vector &x) const;

  private:
    std::vector<char> flags_;   // 0 free, 1 weak (slip), 2 strong (dirichlet)
    std::vector<double> values_;
    std::vector<int> dofs_;
  };

  // Build velocity constraints (destination state layout) for the given BCs
  // at time t, plus an optional pressure pin (DoF of the pressure space and a
  // prescribed value) used to gauge enclosed flows.
  ConstraintSet build_flow_constraints(const SolutionState &state,
                                       const std::vector<VelocityBc> &bcs,
                                       double time,
                                       std::optional<std::pair<int, double>> pressure_pin = std::nullopt);
} // namespace vans

#endif
