#include <vans/step_demo.hpp>

#include <algorithm>
#include <cmath>

namespace vans
{
  namespace
  {
    void validate_step_config(const StepDemoConfig &config)
    {
      if (config.subdivisions < 4 || config.subdivisions % 4 != 0)
        throw ConfigError("run_step_demo: subdivisions must be a multiple of 4 so the step "
                          "edges fall on mesh lines");
      if (config.velocity_degree < 1 || config.pressure_degree < 1)
        throw ConfigError("run_step_demo: element degrees must be at least 1");
      if (config.pressure_degree > config.velocity_degree)
        throw ConfigError("run_step_demo: pressure degree above velocity degree");
      if (config.inlet_speed <= 0.0)
        throw ConfigError("run_step_demo: inlet speed must be positive");
      if (config.viscosity <= 0.0)
        throw ConfigError("run_step_demo: viscosity must be positive");
    }

    // The dense strip is the closed band |x| <= 0.5 (the step assigns the
    // boundary to the dense side). Nodes on the edge see the interpolated
    // value 0.5 as well.
    bool in_dense_strip(const Vec3 &p)
    {
      return std::abs(p.x()) <= 0.5 + 1e-12;
    }

    void measure_oscillations(const SolutionState &state,
                              const StepDemoConfig &config,
                              StepRunMetrics &metrics)
    {
      const FeSpace &V = *state.velocity_space;
      const Mesh &mesh = V.mesh();
      const double plateau =
        config.inlet_speed / (config.uniform_void_fraction ? 1.0 : 0.5);

      double overshoot = 0.0;
      for (int node = 0; node < V.n_dofs(); ++node)
        if (in_dense_strip(V.support_point(node)))
          overshoot = std::max(overshoot, state.x[state.velocity_dof(node, 0)] - plateau);
      metrics.overshoot = overshoot;

      // A cell counts toward the oscillation extent when any of its velocity
      // nodes is off the mass-balance plateau by more than 2 percent.
      double extent = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c)
        {
          const Vec3 lower = mesh.cell_lower(c);
          if (lower.x() < -0.5 - 1e-12 || lower.x() + mesh.cell_size.x() > 0.5 + 1e-12)
            continue;
          bool off_plateau = false;
          for (const int node : V.cell_dofs(c))
            off_plateau = off_plateau ||
                          std::abs(state.x[state.velocity_dof(node, 0)] - plateau) >
                            0.02 * plateau;
          if (off_plateau)
            extent += mesh.cell_measures[c];
        }
      metrics.oscillation_extent = extent;
    }
  } // namespace

  StepDemoResult run_step_demo(const StepDemoConfig &config, const StepRunCallback &on_run)
  {
    validate_step_config(config);

    const int n = config.subdivisions;
    const Mesh mesh = build_box_mesh(2, {n, n, 1}, Vec3(-1, -1, 0), Vec3(1, 1, 0));
    const FeSpace V(mesh, config.velocity_degree);
    const FeSpace P(mesh, config.pressure_degree);
    const FeSpace E(mesh, 1);

    VoidFractionData eps;
    if (config.uniform_void_fraction)
      eps = VoidFractionData::constant(E, 1.0);
    else
      {
        eps.space = &E;
        eps.values = E.interpolate(step_void_fraction);
        eps.prev1 = eps.values;
        eps.prev2 = eps.values;
        eps.dt_mode = EpsDtMode::zero;
      }

    const double u_in = config.inlet_speed;
    std::vector<VelocityBc> bcs;
    bcs.push_back({0, BcKind::dirichlet,
                   [u_in](const Vec3 &, double) { return Vec3(u_in, 0.0, 0.0); }});
    bcs.push_back({1, BcKind::outflow, {}});
    bcs.push_back({2, BcKind::slip, {}});
    bcs.push_back({3, BcKind::slip, {}});

    VansConfig flow;
    flow.form = config.form;
    flow.viscosity = config.viscosity;
    flow.transient = false;
    flow.newton = config.newton;
    flow.n_threads = config.n_threads;

    StepDemoResult result;
    for (const bool graddiv : {true, false})
      {
        VansConfig run_cfg = flow;
        run_cfg.stabilization.grad_div = graddiv;

        // Start from the 1D mass balance (u_x = u_in/eps, no cross flow) so
        // Newton only has to resolve the multi-dimensional correction.
        SolutionState state(V, P);
        state.interpolate(
          [&](const Vec3 &p) {
            const double e = config.uniform_void_fraction ? 1.0 : step_void_fraction(p);
            return Vec3(u_in / e, 0.0, 0.0);
          },
          [](const Vec3 &) { return 0.0; });

        StepRunMetrics metrics;
        try
          {
            const NewtonReport report = solve_stationary(state, run_cfg, eps, nullptr, bcs);
            metrics.converged = report.converged;
            metrics.iterations = report.iterations;
          }
        catch (const NewtonFailure &failure)
          {
            // A stall without the penalty is expected behavior at sharp
            // steps; measure whatever iterate the solver was left with.
            metrics.converged = false;
            metrics.iterations = failure.report.iterations;
          }

        metrics.continuity_residual = continuity_residual_norm(state, run_cfg, eps);
        measure_oscillations(state, config, metrics);

        if (on_run)
          on_run(graddiv, state, eps);
        (graddiv ? result.with_grad_div : result.without_grad_div) = metrics;
      }
    return result;
  }
} // namespace vans
