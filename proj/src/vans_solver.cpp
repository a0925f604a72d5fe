#include <vans/vans_solver.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace vans
{
  VansForm vans_form_from_string(const std::string &name)
  {
    if (name == "A" || name == "a")
      return VansForm::a;
    if (name == "B" || name == "b")
      return VansForm::b;
    throw ConfigError("unknown model form '" + name + "' (expected A or B)");
  }

  double tau_velocity(bool transient, double dt, double u_norm, double h_conv, double h_diff,
                      double viscosity)
  {
    if (h_conv <= 0.0 || h_diff <= 0.0)
      throw SolverError("tau_velocity: element length must be positive");
    double inv_sq =
      std::pow(2.0 * u_norm / h_conv, 2) + 9.0 * std::pow(4.0 * viscosity / (h_diff * h_diff), 2);
    if (transient)
      {
        if (dt <= 0.0)
          throw ConfigError("tau_velocity: transient runs need a positive dt");
        inv_sq += 1.0 / (dt * dt);
      }
    if (inv_sq <= 0.0)
      throw SolverError("tau_velocity: degenerate stabilization parameter (zero velocity and viscosity)");
    return 1.0 / std::sqrt(inv_sq);
  }

  double grad_div_gamma(double u_norm, double h, double viscosity)
  {
    return viscosity + u_norm * h;
  }

  double element_length(const Mesh &mesh, int velocity_degree)
  {
    return std::pow(mesh.cell_measures[0], 1.0 / mesh.dim) / velocity_degree;
  }

  double diffusive_length(const Mesh &mesh)
  {
    return std::pow(mesh.cell_measures[0], 1.0 / mesh.dim);
  }

  namespace
  {
    // Read-only context shared by all assembly workers.
    struct AsmContext
    {
      const SolutionState *state = nullptr;
      const VansConfig *config = nullptr;
      const VoidFractionData *eps = nullptr;
      const std::vector<CellDrag> *drag = nullptr;
      const Vector *tau_vec = nullptr; // velocity source for tau and gamma
      QuadratureRule rule;
      BasisTable vb, pb, eb;
      bool fe_eps = false;
      std::array<double, 3> bdf{0.0, 0.0, 0.0};
      double h_conv = 0.0;
      double h_diff = 0.0;
      bool jacobian = false;
    };

    double trace_d(const Mat3 &m, int dim)
    {
      double t = m(0, 0) + m(1, 1);
      if (dim > 2)
        t += m(2, 2);
      return t;
    }

    // Assemble cells [cell_begin, cell_end) into a private triplet list and a
    // full-length partial residual.
    void assemble_range(const AsmContext &ctx,
                        int cell_begin,
                        int cell_end,
                        const ConstraintSet &constraints,
                        std::vector<Eigen::Triplet<double>> &triplets,
                        Vector &residual)
    {
      const SolutionState &st = *ctx.state;
      const VansConfig &cfg = *ctx.config;
      const FeSpace &V = *st.velocity_space;
      const FeSpace &P = *st.pressure_space;
      const Mesh &mesh = V.mesh();

      const int dim = st.dim;
      const int nv = V.dofs_per_cell();
      const int np = P.dofs_per_cell();
      const int nvd = nv * dim;
      const int ntot = nvd + np;

      const bool form_a = cfg.form == VansForm::a;
      const bool transient = cfg.transient;
      const bool supg = cfg.stabilization.supg;
      const bool pspg = cfg.stabilization.pspg;
      const bool graddiv = cfg.stabilization.grad_div;
      const double nu = cfg.viscosity;
      const double c0 = transient ? ctx.bdf[0] : 0.0;
      const bool tau_same = (ctx.tau_vec == &st.x);
      const double time = st.time;

      Eigen::VectorXd rloc(ntot);
      Eigen::MatrixXd kloc;
      if (ctx.jacobian)
        kloc.resize(ntot, ntot);

      std::vector<Vec3> uc(nv), u1c(nv), u2c(nv), utc(nv);
      std::vector<double> pc(np);
      const int ne = ctx.fe_eps ? ctx.eps->space->dofs_per_cell() : 0;
      std::vector<double> ec(ne), e1c(ne), e2c(ne);
      std::vector<int> rowmap(ntot);

      if (ctx.jacobian)
        triplets.reserve(static_cast<size_t>(cell_end - cell_begin) * ntot * ntot);

      for (int cell = cell_begin; cell < cell_end; ++cell)
        {
          const auto &vd = V.cell_dofs(cell);
          const auto &pd = P.cell_dofs(cell);
          const double jac = mesh.cell_measures[cell];
          const Vec3 cell_lower = mesh.cell_lower(cell);

          for (int a = 0; a < nv; ++a)
            for (int c = 0; c < dim; ++c)
              rowmap[a * dim + c] = st.velocity_dof(vd[a], c);
          for (int a = 0; a < np; ++a)
            rowmap[nvd + a] = st.pressure_dof(pd[a]);

          for (int j = 0; j < nv; ++j)
            {
              uc[j].setZero();
              u1c[j].setZero();
              u2c[j].setZero();
              utc[j].setZero();
              for (int c = 0; c < dim; ++c)
                {
                  const int dof = st.velocity_dof(vd[j], c);
                  uc[j][c] = st.x[dof];
                  if (transient)
                    {
                      u1c[j][c] = st.prev1[dof];
                      u2c[j][c] = st.prev2[dof];
                    }
                  if (!tau_same)
                    utc[j][c] = (*ctx.tau_vec)[dof];
                }
            }
          for (int j = 0; j < np; ++j)
            pc[j] = st.x[st.pressure_dof(pd[j])];

          if (ctx.fe_eps)
            {
              const auto &ed = ctx.eps->space->cell_dofs(cell);
              for (int j = 0; j < ne; ++j)
                {
                  ec[j] = ctx.eps->values[ed[j]];
                  e1c[j] = ctx.eps->prev1.size() > 0 ? ctx.eps->prev1[ed[j]] : ec[j];
                  e2c[j] = ctx.eps->prev2.size() > 0 ? ctx.eps->prev2[ed[j]] : ec[j];
                }
            }

          const CellDrag cd = ctx.drag ? (*ctx.drag)[cell] : CellDrag{};

          rloc.setZero();
          if (ctx.jacobian)
            kloc.setZero();

          for (int q = 0; q < ctx.rule.size(); ++q)
            {
              const double w = ctx.rule.weights[q] * jac;
              const auto &phiv = ctx.vb.value[q];
              const auto &gradv = ctx.vb.grad[q];
              const auto &lapv = ctx.vb.laplace[q];
              const auto &phip = ctx.pb.value[q];
              const auto &gpsi = ctx.pb.grad[q];

              const Vec3 x_q = cell_lower + ctx.rule.points[q].cwiseProduct(mesh.cell_size);

              // Solution values at the point.
              Vec3 u = Vec3::Zero(), u_hist = Vec3::Zero(), lapu = Vec3::Zero();
              Mat3 gradu = Mat3::Zero();
              for (int j = 0; j < nv; ++j)
                {
                  u += phiv[j] * uc[j];
                  lapu += lapv[j] * uc[j];
                  gradu += uc[j] * gradv[j].transpose();
                  if (transient)
                    u_hist += phiv[j] * (ctx.bdf[1] * u1c[j] + ctx.bdf[2] * u2c[j]);
                }
              Vec3 u_tau = u;
              if (!tau_same)
                {
                  u_tau.setZero();
                  for (int j = 0; j < nv; ++j)
                    u_tau += phiv[j] * utc[j];
                }

              double p = 0.0;
              Vec3 gradp = Vec3::Zero();
              for (int j = 0; j < np; ++j)
                {
                  p += phip[j] * pc[j];
                  gradp += pc[j] * gpsi[j];
                }

              // Void fraction and its derivatives.
              double eps_v = 1.0;
              Vec3 geps = Vec3::Zero();
              double deps_dt = 0.0;
              if (ctx.eps->analytic())
                {
                  eps_v = ctx.eps->analytic_value(x_q, time);
                  geps = ctx.eps->analytic_grad(x_q, time);
                }
              else
                {
                  eps_v = 0.0;
                  const auto &phie = ctx.eb.value[q];
                  const auto &ge = ctx.eb.grad[q];
                  for (int j = 0; j < ne; ++j)
                    {
                      eps_v += phie[j] * ec[j];
                      geps += ec[j] * ge[j];
                    }
                }
              if (ctx.eps->dt_mode == EpsDtMode::analytic)
                deps_dt = ctx.eps->dt_analytic(x_q, time);
              else if (ctx.eps->dt_mode == EpsDtMode::bdf)
                {
                  const auto &phie = ctx.eb.value[q];
                  for (int j = 0; j < ne; ++j)
                    deps_dt += phie[j] * (ctx.bdf[0] * ec[j] + ctx.bdf[1] * e1c[j] + ctx.bdf[2] * e2c[j]);
                }

              if (!(eps_v > 0.0))
                throw SolverError("assemble: nonpositive void fraction " + std::to_string(eps_v) +
                                  " at a quadrature point of cell " + std::to_string(cell));

              const double s_m = cfg.mass_source ? cfg.mass_source(x_q, time) : 0.0;
              const Vec3 f = cfg.body_force ? cfg.body_force(x_q, time) : Vec3::Zero();
              const Vec3 g_src = cfg.momentum_source ? cfg.momentum_source(x_q, time) : Vec3::Zero();

              const double u_tau_norm = u_tau.norm();
              const double tau =
                (supg || pspg)
                  ? tau_velocity(transient, cfg.dt, u_tau_norm, ctx.h_conv, ctx.h_diff, nu)
                  : 0.0;
              const double gamma = graddiv ? grad_div_gamma(u_tau_norm, ctx.h_conv, nu) : 0.0;

              const double nu_eff = form_a ? eps_v * nu : nu;
              const double p_eff = form_a ? eps_v * p : p;

              const Vec3 conv = gradu * u;
              const Vec3 dudt = transient ? Vec3(c0 * u + u_hist) : Vec3::Zero();

              // Strong residuals driving SUPG, PSPG, and grad-div.
              Vec3 SR = eps_v * dudt + eps_v * conv + s_m * u +
                        cd.coefficient * (u - cd.reference_velocity) - nu_eff * lapu - eps_v * f -
                        g_src;
              SR += form_a ? Vec3(eps_v * gradp) : gradp;
              const double Rc = deps_dt + eps_v * trace_d(gradu, dim) + u.dot(geps) - s_m;

              // Momentum terms tested with phi_a directly.
              Vec3 avec = eps_v * dudt + eps_v * conv + s_m * u +
                          cd.coefficient * (u - cd.reference_velocity) - eps_v * f - g_src;
              if (form_a)
                avec += Vec3(nu * (gradu * geps) - p * geps);

              for (int a = 0; a < nv; ++a)
                {
                  Vec3 contrib = phiv[a] * avec;
                  contrib += nu_eff * (gradu * gradv[a]);
                  contrib -= p_eff * gradv[a];
                  if (supg)
                    contrib += (tau * u.dot(gradv[a])) * SR;
                  if (graddiv)
                    contrib += (gamma * Rc) * gradv[a];
                  for (int c = 0; c < dim; ++c)
                    rloc[a * dim + c] += w * contrib[c];
                }
              for (int a = 0; a < np; ++a)
                {
                  double r = Rc * phip[a];
                  if (pspg)
                    r += tau * SR.dot(gpsi[a]);
                  rloc[nvd + a] += w * r;
                }

              if (!ctx.jacobian)
                continue;

              // Velocity trial functions phi_b e_e. tau, gamma, and the drag
              // factors are held fixed; the SUPG weight (u . grad)v is
              // differentiated.
              for (int b = 0; b < nv; ++b)
                {
                  const double convb = u.dot(gradv[b]);
                  const double dsr_diag =
                    (eps_v * c0 + s_m + cd.coefficient) * phiv[b] + eps_v * convb - nu_eff * lapv[b];
                  for (int e = 0; e < dim; ++e)
                    {
                      const int col = b * dim + e;
                      for (int a = 0; a < nv; ++a)
                        {
                          const double udga = u.dot(gradv[a]);
                          for (int c = 0; c < dim; ++c)
                            {
                              double k = eps_v * phiv[b] * gradu(c, e) * phiv[a];
                              if (c == e)
                                {
                                  k += ((eps_v * c0 + s_m + cd.coefficient) * phiv[b] +
                                        eps_v * convb) *
                                       phiv[a];
                                  k += nu_eff * gradv[b].dot(gradv[a]);
                                  if (form_a)
                                    k += nu * gradv[b].dot(geps) * phiv[a];
                                }
                              if (supg)
                                {
                                  const double dsr_ce =
                                    (c == e ? dsr_diag : 0.0) + eps_v * phiv[b] * gradu(c, e);
                                  k += tau * (dsr_ce * udga + SR[c] * phiv[b] * gradv[a][e]);
                                }
                              if (graddiv)
                                k += gamma * (eps_v * gradv[b][e] + phiv[b] * geps[e]) *
                                     gradv[a][c];
                              kloc(a * dim + c, col) += w * k;
                            }
                        }
                      for (int a = 0; a < np; ++a)
                        {
                          double k = (eps_v * gradv[b][e] + phiv[b] * geps[e]) * phip[a];
                          if (pspg)
                            {
                              double t = dsr_diag * gpsi[a][e];
                              t += eps_v * phiv[b] * gradu.col(e).dot(gpsi[a]);
                              k += tau * t;
                            }
                          kloc(nvd + a, col) += w * k;
                        }
                    }
                }

              // Pressure trial functions psi_b.
              for (int b = 0; b < np; ++b)
                {
                  const int col = nvd + b;
                  const Vec3 dgradp = form_a ? Vec3(eps_v * gpsi[b]) : gpsi[b];
                  for (int a = 0; a < nv; ++a)
                    {
                      const double udga = u.dot(gradv[a]);
                      for (int c = 0; c < dim; ++c)
                        {
                          double k;
                          if (form_a)
                            k = -(eps_v * phip[b] * gradv[a][c] + phip[b] * geps[c] * phiv[a]);
                          else
                            k = -phip[b] * gradv[a][c];
                          if (supg)
                            k += tau * dgradp[c] * udga;
                          kloc(a * dim + c, col) += w * k;
                        }
                    }
                  if (pspg)
                    for (int a = 0; a < np; ++a)
                      kloc(nvd + a, col) += w * tau * dgradp.dot(gpsi[a]);
                }
            }

          for (int i = 0; i < ntot; ++i)
            residual[rowmap[i]] += rloc[i];
          if (ctx.jacobian)
            for (int i = 0; i < ntot; ++i)
              {
                if (constraints.constrained(rowmap[i]))
                  continue;
                for (int j = 0; j < ntot; ++j)
                  if (kloc(i, j) != 0.0)
                    triplets.emplace_back(rowmap[i], rowmap[j], kloc(i, j));
              }
        }
    }

    void validate_inputs(const SolutionState &state,
                         const VansConfig &config,
                         const VoidFractionData &eps,
                         const std::vector<CellDrag> *drag)
    {
      if (state.velocity_space == nullptr || state.pressure_space == nullptr)
        throw StateError("assemble: state has no spaces attached");
      if (config.viscosity <= 0.0)
        throw ConfigError("assemble: viscosity must be positive");
      if (config.transient && config.dt <= 0.0)
        throw ConfigError("assemble: transient runs need a positive dt");
      if (eps.analytic())
        {
          if (!eps.analytic_grad)
            throw ConfigError("assemble: analytic void fraction needs an analytic gradient");
        }
      else
        {
          if (eps.space == nullptr)
            throw ConfigError("assemble: void fraction has neither nodal data nor closed form");
          if (&eps.space->mesh() != &state.velocity_space->mesh())
            throw ConfigError("assemble: void fraction lives on a different mesh");
          if (eps.values.size() != eps.space->n_dofs())
            throw ConfigError("assemble: void fraction vector length mismatch");
        }
      if (eps.dt_mode == EpsDtMode::analytic && !eps.dt_analytic)
        throw ConfigError("assemble: analytic eps time derivative requested but not provided");
      if (eps.dt_mode == EpsDtMode::bdf)
        {
          if (eps.analytic())
            throw ConfigError("assemble: BDF eps time derivative requires nodal data");
          if (!config.transient)
            throw ConfigError("assemble: BDF eps time derivative requires a transient run");
        }
      if (drag && static_cast<int>(drag->size()) != state.velocity_space->mesh().n_cells())
        throw ConfigError("assemble: drag context count does not match the mesh");
    }
  } // namespace

  void assemble_system(const SolutionState &state,
                       const VansConfig &config,
                       const VoidFractionData &void_fraction,
                       const std::vector<CellDrag> *drag,
                       const ConstraintSet &constraints,
                       Vector &residual,
                       SparseMatrix *jacobian,
                       const Vector *tau_reference)
  {
    validate_inputs(state, config, void_fraction, drag);

    const FeSpace &V = *state.velocity_space;
    const FeSpace &P = *state.pressure_space;
    const Mesh &mesh = V.mesh();
    const int n = state.n_dofs();

    AsmContext ctx;
    ctx.state = &state;
    ctx.config = &config;
    ctx.eps = &void_fraction;
    ctx.drag = drag;
    ctx.tau_vec = tau_reference ? tau_reference : &state.x;
    ctx.rule = gauss_rule(mesh.dim, V.degree() + 1);
    ctx.vb = build_basis_table(mesh.dim, V.degree(), ctx.rule, mesh.cell_size);
    ctx.pb = build_basis_table(mesh.dim, P.degree(), ctx.rule, mesh.cell_size);
    ctx.fe_eps = !void_fraction.analytic();
    if (ctx.fe_eps || void_fraction.dt_mode == EpsDtMode::bdf)
      ctx.eb = build_basis_table(mesh.dim, void_fraction.space->degree(), ctx.rule, mesh.cell_size);
    if (config.transient)
      ctx.bdf = config.bdf.coefficients(config.dt);
    ctx.h_conv = element_length(mesh, V.degree());
    ctx.h_diff = diffusive_length(mesh);
    ctx.jacobian = jacobian != nullptr;

    const int n_threads = std::max(1, std::min(config.n_threads, mesh.n_cells()));

    std::vector<std::vector<Eigen::Triplet<double>>> chunk_triplets(n_threads);
    std::vector<Vector> chunk_residual(n_threads, Vector::Zero(n));

    if (n_threads == 1)
      assemble_range(ctx, 0, mesh.n_cells(), constraints, chunk_triplets[0], chunk_residual[0]);
    else
      {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t)
          {
            const int begin = static_cast<int>(static_cast<long>(mesh.n_cells()) * t / n_threads);
            const int end = static_cast<int>(static_cast<long>(mesh.n_cells()) * (t + 1) / n_threads);
            workers.emplace_back([&, t, begin, end]() {
              assemble_range(ctx, begin, end, constraints, chunk_triplets[t], chunk_residual[t]);
            });
          }
        for (auto &w : workers)
          w.join();
      }

    // Merge in fixed chunk order so results do not depend on thread timing.
    residual = Vector::Zero(n);
    for (int t = 0; t < n_threads; ++t)
      residual += chunk_residual[t];

    for (const int dof : constraints.constrained_dofs())
      residual[dof] = state.x[dof] - constraints.value(dof);

    if (jacobian)
      {
        std::vector<Eigen::Triplet<double>> triplets = std::move(chunk_triplets[0]);
        for (int t = 1; t < n_threads; ++t)
          triplets.insert(triplets.end(), chunk_triplets[t].begin(), chunk_triplets[t].end());
        for (const int dof : constraints.constrained_dofs())
          triplets.emplace_back(dof, dof, 1.0);
        jacobian->resize(n, n);
        jacobian->setFromTriplets(triplets.begin(), triplets.end());
      }
  }

  NewtonReport newton_solve(SolutionState &state,
                            const VansConfig &config,
                            const VoidFractionData &void_fraction,
                            const std::vector<CellDrag> *drag,
                            const ConstraintSet &constraints)
  {
    NewtonReport report;
    const int n = state.n_dofs();
    Vector residual(n);
    SparseMatrix jacobian(n, n);

    for (int it = 0;; ++it)
      {
        assemble_system(state, config, void_fraction, drag, constraints, residual, &jacobian);
        const double rnorm = residual.norm();
        if (!std::isfinite(rnorm))
          throw SolverError("newton_solve: residual is not finite");
        report.residual_history.push_back(rnorm);
        if (rnorm < config.newton.tolerance)
          {
            report.converged = true;
            report.iterations = it;
            return report;
          }
        if (rnorm > 1e12)
          throw SolverError("newton_solve: residual diverged (" + std::to_string(rnorm) + ")");
        if (it >= config.newton.max_iterations)
          {
            report.iterations = it;
            throw NewtonFailure("newton_solve: no convergence in " +
                                  std::to_string(config.newton.max_iterations) +
                                  " iterations, last residual " + std::to_string(rnorm),
                                report);
          }

        const Vector rhs = -residual;
        const Vector delta = solve_linear(jacobian, rhs, config.linear);
        state.x += config.newton.relaxation * delta;
      }
  }

  NewtonReport solve_stationary(SolutionState &state,
                                const VansConfig &config,
                                const VoidFractionData &void_fraction,
                                const std::vector<CellDrag> *drag,
                                const std::vector<VelocityBc> &bcs,
                                std::optional<std::pair<int, double>> pressure_pin)
  {
    if (config.transient)
      throw ConfigError("solve_stationary: config is marked transient");
    const ConstraintSet constraints = build_flow_constraints(state, bcs, state.time, pressure_pin);
    constraints.enforce(state.x);
    return newton_solve(state, config, void_fraction, drag, constraints);
  }

  NewtonReport advance_time_step(SolutionState &state,
                                 const VansConfig &config,
                                 const VoidFractionData &void_fraction,
                                 const std::vector<CellDrag> *drag,
                                 const std::vector<VelocityBc> &bcs,
                                 std::optional<std::pair<int, double>> pressure_pin)
  {
    if (!config.transient || config.dt <= 0.0)
      throw ConfigError("advance_time_step: config must be transient with a positive dt");
    state.push_history();
    state.time += config.dt;
    const ConstraintSet constraints = build_flow_constraints(state, bcs, state.time, pressure_pin);
    constraints.enforce(state.x);
    return newton_solve(state, config, void_fraction, drag, constraints);
  }

  namespace
  {
    // Shared loop for the continuity diagnostics: hands each cell integral of
    // the continuity residual (and its square) to the caller.
    template <typename CellOp>
    void integrate_continuity(const SolutionState &state,
                              const VansConfig &config,
                              const VoidFractionData &eps,
                              CellOp &&op)
    {
      const FeSpace &V = *state.velocity_space;
      const Mesh &mesh = V.mesh();
      const int dim = mesh.dim;
      const int nv = V.dofs_per_cell();

      // Generous rule: the report should reflect the fields, not quadrature.
      const int n_q = std::min(12, std::max(V.degree() + 2, 6));
      const QuadratureRule rule = gauss_rule(dim, n_q);
      const BasisTable vb = build_basis_table(dim, V.degree(), rule, mesh.cell_size);
      const bool fe_eps = !eps.analytic();
      BasisTable ebt;
      if (fe_eps || eps.dt_mode == EpsDtMode::bdf)
        ebt = build_basis_table(dim, eps.space->degree(), rule, mesh.cell_size);

      std::array<double, 3> bdf{0.0, 0.0, 0.0};
      if (config.transient)
        bdf = config.bdf.coefficients(config.dt);

      const int ne = fe_eps ? eps.space->dofs_per_cell() : 0;

      for (int cell = 0; cell < mesh.n_cells(); ++cell)
        {
          const auto &vd = V.cell_dofs(cell);
          const double jac = mesh.cell_measures[cell];
          const Vec3 cell_lower = mesh.cell_lower(cell);
          const std::vector<int> *ed = fe_eps ? &eps.space->cell_dofs(cell) : nullptr;

          double integral = 0.0;
          double square = 0.0;
          for (int q = 0; q < rule.size(); ++q)
            {
              const double w = rule.weights[q] * jac;
              const Vec3 x_q = cell_lower + rule.points[q].cwiseProduct(mesh.cell_size);

              Vec3 u = Vec3::Zero();
              Mat3 gradu = Mat3::Zero();
              for (int j = 0; j < nv; ++j)
                {
                  Vec3 uj = Vec3::Zero();
                  for (int c = 0; c < dim; ++c)
                    uj[c] = state.x[state.velocity_dof(vd[j], c)];
                  u += vb.value[q][j] * uj;
                  gradu += uj * vb.grad[q][j].transpose();
                }

              double eps_v = 1.0;
              Vec3 geps = Vec3::Zero();
              double deps_dt = 0.0;
              if (eps.analytic())
                {
                  eps_v = eps.analytic_value(x_q, state.time);
                  geps = eps.analytic_grad(x_q, state.time);
                }
              else
                {
                  eps_v = 0.0;
                  for (int j = 0; j < ne; ++j)
                    {
                      eps_v += ebt.value[q][j] * eps.values[(*ed)[j]];
                      geps += eps.values[(*ed)[j]] * ebt.grad[q][j];
                    }
                }
              if (eps.dt_mode == EpsDtMode::analytic)
                deps_dt = eps.dt_analytic(x_q, state.time);
              else if (eps.dt_mode == EpsDtMode::bdf)
                for (int j = 0; j < ne; ++j)
                  deps_dt += ebt.value[q][j] *
                             (bdf[0] * eps.values[(*ed)[j]] + bdf[1] * eps.prev1[(*ed)[j]] +
                              bdf[2] * eps.prev2[(*ed)[j]]);

              const double s_m = config.mass_source ? config.mass_source(x_q, state.time) : 0.0;
              const double rc = deps_dt + eps_v * trace_d(gradu, dim) + u.dot(geps) - s_m;
              integral += w * rc;
              square += w * rc * rc;
            }
          op(integral, square);
        }
    }
  } // namespace

  MassConservationReport mass_conservation_report(const SolutionState &state,
                                                  const VansConfig &config,
                                                  const VoidFractionData &void_fraction)
  {
    double global = 0.0;
    double local_max = 0.0;
    integrate_continuity(state, config, void_fraction, [&](double integral, double) {
      global += integral;
      local_max = std::max(local_max, std::abs(integral));
    });
    MassConservationReport report;
    report.global_source = std::abs(global);
    report.max_local_source = local_max;
    return report;
  }

  double continuity_residual_norm(const SolutionState &state,
                                  const VansConfig &config,
                                  const VoidFractionData &void_fraction)
  {
    double sum = 0.0;
    integrate_continuity(state, config, void_fraction, [&](double, double square) { sum += square; });
    return std::sqrt(sum);
  }
} // namespace vans
