#include <vans/boundary.hpp>

#include <algorithm>

namespace vans
{
  void ConstraintSet::clear(int n_dofs)
  {
    flags_.assign(n_dofs, 0);
    values_.assign(n_dofs, 0.0);
    dofs_.clear();
  }

  void ConstraintSet::add(int dof, double value, bool strong)
  {
    const char level = strong ? 2 : 1;
    if (flags_[dof] >= level && flags_[dof] != 0)
      {
        // Already claimed at equal or higher priority; strong re-claims
        // overwrite the value (last Dirichlet wins deterministically).
        if (flags_[dof] == level && strong)
          values_[dof] = value;
        return;
      }
    if (flags_[dof] == 0)
      dofs_.push_back(dof);
    flags_[dof] = level;
    values_[dof] = value;
  }

  void ConstraintSet::enforce(Vector &x) const
  {
    for (int dof : dofs_)
      x[dof] = values_[dof];
  }

  ConstraintSet build_flow_constraints(const SolutionState &state,
                                       const std::vector<VelocityBc> &bcs,
                                       double time,
                                       std::optional<std::pair<int, double>> pressure_pin)
  {
    ConstraintSet constraints;
    constraints.clear(state.n_dofs());

    const FeSpace &vspace = *state.velocity_space;

    // Slip first, then Dirichlet, so Dirichlet takes precedence on shared
    // edges regardless of the order the caller listed the faces.
    for (const auto &bc : bcs)
      {
        if (bc.kind != BcKind::slip)
          continue;
        const int axis = bc.tag / 2;
        for (int node : vspace.boundary_dofs(bc.tag))
          constraints.add(state.velocity_dof(node, axis), 0.0, false);
      }

    for (const auto &bc : bcs)
      {
        if (bc.kind != BcKind::dirichlet)
          continue;
        if (!bc.value)
          throw ConfigError("Dirichlet boundary without a value function (tag " +
                            std::to_string(bc.tag) + ")");
        for (int node : vspace.boundary_dofs(bc.tag))
          {
            const Vec3 g = bc.value(vspace.support_point(node), time);
            for (int c = 0; c < state.dim; ++c)
              constraints.add(state.velocity_dof(node, c), g[c], true);
          }
      }

    if (pressure_pin)
      {
        if (pressure_pin->first < 0 || pressure_pin->first >= state.n_pressure_dofs())
          throw ConfigError("pressure pin DoF out of range");
        constraints.add(state.pressure_dof(pressure_pin->first), pressure_pin->second, true);
      }

    return constraints;
  }
} // namespace vans
