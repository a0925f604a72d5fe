#include <vans/void_fraction.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vans
{
  ParticleSet particles_from_csv(const std::string &path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot open particle file: " + path);

    ParticleSet particles;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
      {
        ++lineno;
        if (line.empty() || line[0] == '#')
          continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        bool numeric = true;
        while (std::getline(ss, tok, ','))
          {
            try
              {
                size_t pos = 0;
                vals.push_back(std::stod(tok, &pos));
              }
            catch (const std::exception &)
              {
                numeric = false;
                break;
              }
          }
        if (!numeric)
          {
            if (particles.size() == 0 && vals.empty())
              continue; // header line
            throw IoError("malformed particle row at line " + std::to_string(lineno) +
                          " of " + path);
          }
        if (vals.size() != 7)
          throw IoError("particle row at line " + std::to_string(lineno) + " of " + path +
                        " has " + std::to_string(vals.size()) + " columns, expected 7");
        if (vals[3] <= 0.0)
          throw IoError("particle row at line " + std::to_string(lineno) + " of " + path +
                        " has non-positive radius");
        particles.add(Vec3(vals[0], vals[1], vals[2]), vals[3], Vec3(vals[4], vals[5], vals[6]));
      }
    return particles;
  }

  void particles_to_csv(const ParticleSet &particles, const std::string &path)
  {
    std::ofstream out(path);
    if (!out)
      throw IoError("cannot write particle file: " + path);
    out << "x,y,z,r,vx,vy,vz\n";
    out.precision(17);
    for (int p = 0; p < particles.size(); ++p)
      out << particles.position[p][0] << ',' << particles.position[p][1] << ','
          << particles.position[p][2] << ',' << particles.radius[p] << ','
          << particles.velocity[p][0] << ',' << particles.velocity[p][1] << ','
          << particles.velocity[p][2] << '\n';
  }

  double particle_volume(double radius, int dim)
  {
    if (dim == 2)
      return M_PI * radius * radius;
    return 4.0 / 3.0 * M_PI * radius * radius * radius;
  }

  PcmResult pcm_cell_values(const Mesh &mesh, const ParticleSet &particles)
  {
    PcmResult result;
    result.cell_values.assign(mesh.n_cells(), 0.0);

    std::vector<double> solid(mesh.n_cells(), 0.0);
    for (int p = 0; p < particles.size(); ++p)
      {
        const int cell = mesh.locate_cell(particles.position[p]);
        if (cell < 0)
          {
            ++result.n_outside;
            continue;
          }
        const double v = particle_volume(particles.radius[p], mesh.dim);
        solid[cell] += v;
        result.binned_solid_volume += v;
      }

    for (int c = 0; c < mesh.n_cells(); ++c)
      result.cell_values[c] = std::max(0.0, (mesh.cell_measures[c] - solid[c]) / mesh.cell_measures[c]);
    return result;
  }

  ProjectionSystem build_projection_system(const FeSpace &space,
                                           const std::vector<double> &cell_values,
                                           double smoothing_length_sq)
  {
    const Mesh &mesh = space.mesh();
    if (static_cast<int>(cell_values.size()) != mesh.n_cells())
      throw ConfigError("build_projection_system: cell data size does not match the mesh");
    if (smoothing_length_sq < 0.0)
      throw ConfigError("build_projection_system: smoothing length must be non-negative");

    const QuadratureRule rule = gauss_rule(mesh.dim, space.degree() + 1);
    const BasisTable basis = build_basis_table(mesh.dim, space.degree(), rule, mesh.cell_size);
    const int n_loc = space.dofs_per_cell();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(mesh.n_cells()) * n_loc * n_loc);
    Vector b = Vector::Zero(space.n_dofs());
    double rhs_mass = 0.0;

    for (int c = 0; c < mesh.n_cells(); ++c)
      {
        const auto &dofs = space.cell_dofs(c);
        const double jac = mesh.cell_measures[c];
        const double f = cell_values[c];
        rhs_mass += f * jac;

        for (int q = 0; q < rule.size(); ++q)
          {
            const double w = rule.weights[q] * jac;
            for (int i = 0; i < n_loc; ++i)
              {
                b[dofs[i]] += w * f * basis.value[q][i];
                for (int j = 0; j < n_loc; ++j)
                  {
                    double entry = basis.value[q][i] * basis.value[q][j];
                    if (smoothing_length_sq > 0.0)
                      entry += smoothing_length_sq * basis.grad[q][i].dot(basis.grad[q][j]);
                    triplets.emplace_back(dofs[i], dofs[j], w * entry);
                  }
              }
          }
      }

    ProjectionSystem system;
    system.space = &space;
    system.A.resize(space.n_dofs(), space.n_dofs());
    system.A.setFromTriplets(triplets.begin(), triplets.end());
    system.b = std::move(b);
    system.rhs_mass = rhs_mass;
    return system;
  }

  Vector project_void_fraction(const ProjectionSystem &system)
  {
    return solve_spd(system.A, system.b, 1e-12);
  }

  ActiveSetResult bound_void_fraction(const ProjectionSystem &system,
                                      double lo,
                                      double hi,
                                      int max_iterations,
                                      double kkt_tolerance)
  {
    const FeSpace &space = *system.space;
    if (space.degree() != 1)
      throw ConfigError("bound_void_fraction: only degree-1 void fraction spaces are supported");
    if (!(lo < hi))
      throw ConfigError("bound_void_fraction: requires lower bound < upper bound");

    const int n = space.n_dofs();
    const SparseMatrix &A = system.A;
    const Vector &b = system.b;

    // Multiplier scaling for the active-set update; any positive value of the
    // order of the matrix diagonal works.
    double c_scale = 0.0;
    for (int i = 0; i < n; ++i)
      c_scale += A.coeff(i, i);
    c_scale = 100.0 * c_scale / n;

    // 0 = free, -1 = at lower bound, +1 = at upper bound.
    std::vector<int8_t> active(n, 0), previous(n, 0);
    Vector x = Vector::Zero(n);

    // The primal-dual exchange below is only guaranteed to settle when A is an
    // M-matrix; the consistent mass matrix has positive off-diagonal entries,
    // so with weak smoothing the exchange can cycle between two sets. Track the
    // sets already visited and fall back to projected Gauss-Seidel (monotone
    // for any SPD matrix) when a repeat shows up.
    std::set<std::vector<int8_t>> visited;
    bool use_fallback = false;

    ActiveSetResult result;
    for (int iteration = 1; iteration <= max_iterations; ++iteration)
      {
        // Condense active DoFs out of the system and solve on the free set.
        std::vector<int> free_index(n, -1);
        int n_free = 0;
        for (int i = 0; i < n; ++i)
          if (active[i] == 0)
            free_index[i] = n_free++;

        for (int i = 0; i < n; ++i)
          if (active[i] != 0)
            x[i] = (active[i] < 0) ? lo : hi;

        Vector rhs = Vector::Zero(n_free);
        std::vector<Eigen::Triplet<double>> triplets;
        for (int col = 0; col < A.outerSize(); ++col)
          for (SparseMatrix::InnerIterator it(A, col); it; ++it)
            {
              const int i = static_cast<int>(it.row());
              const int j = static_cast<int>(it.col());
              if (active[i] != 0)
                continue;
              if (active[j] == 0)
                triplets.emplace_back(free_index[i], free_index[j], it.value());
              else
                rhs[free_index[i]] -= it.value() * x[j];
            }
        for (int i = 0; i < n; ++i)
          if (active[i] == 0)
            rhs[free_index[i]] += b[i];

        if (n_free > 0)
          {
            SparseMatrix Aff(n_free, n_free);
            Aff.setFromTriplets(triplets.begin(), triplets.end());
            const Vector xf = solve_spd(Aff, rhs, 1e-12);
            for (int i = 0; i < n; ++i)
              if (active[i] == 0)
                x[i] = xf[free_index[i]];
          }

        // Multiplier estimate: residual of the unconstrained equations.
        const Vector r = A * x - b;

        previous = active;
        for (int i = 0; i < n; ++i)
          {
            const double mu = r[i];
            if (mu + c_scale * (lo - x[i]) > 0.0)
              active[i] = -1;
            else if (-mu + c_scale * (x[i] - hi) > 0.0)
              active[i] = 1;
            else
              active[i] = 0;
          }

        result.iterations = iteration;
        if (active == previous)
          break;
        if (!visited.insert(active).second || iteration == max_iterations)
          {
            use_fallback = true;
            break;
          }
      }

    if (use_fallback)
      {
        Vector diag(n);
        for (int i = 0; i < n; ++i)
          {
            diag[i] = A.coeff(i, i);
            x[i] = std::clamp(x[i], lo, hi);
          }

        const double snap = 1e-12 * (hi - lo);
        const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
        const int max_sweeps = 50000;
        for (int sweep = 1; sweep <= max_sweeps; ++sweep)
          {
            for (int i = 0; i < n; ++i)
              {
                // A is symmetric, so column i doubles as row i.
                double row_dot = 0.0;
                for (SparseMatrix::InnerIterator it(A, i); it; ++it)
                  row_dot += it.value() * x[it.row()];
                x[i] = std::clamp(x[i] + (b[i] - row_dot) / diag[i], lo, hi);
              }
            if (sweep % 16 != 0 && sweep != max_sweeps)
              continue;

            // Converged once every interior node satisfies its equation; nodes
            // pinned at a bound only need the correct multiplier sign.
            const Vector r = A * x - b;
            double worst = 0.0;
            for (int i = 0; i < n; ++i)
              {
                if (x[i] <= lo + snap && r[i] > 0.0)
                  continue;
                if (x[i] >= hi - snap && r[i] < 0.0)
                  continue;
                worst = std::max(worst, std::abs(r[i]) / scale);
              }
            if (worst <= 0.1 * kkt_tolerance)
              break;
            if (sweep == max_sweeps)
              throw SolverError("bound_void_fraction: projected Gauss-Seidel fallback "
                                "did not converge");
          }

        const Vector r = A * x - b;
        for (int i = 0; i < n; ++i)
          {
            if (x[i] <= lo + snap && r[i] > 0.0)
              active[i] = -1;
            else if (x[i] >= hi - snap && r[i] < 0.0)
              active[i] = 1;
            else
              active[i] = 0;
          }
      }

    // KKT residual: free equations (relative to ||b||_inf), sign of the
    // multipliers on active nodes, and primal feasibility.
    const Vector r = A * x - b;
    const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
    double kkt = 0.0;
    for (int i = 0; i < n; ++i)
      {
        if (active[i] == 0)
          {
            kkt = std::max(kkt, std::abs(r[i]) / scale);
            kkt = std::max(kkt, std::max(lo - x[i], x[i] - hi));
          }
        else if (active[i] < 0)
          kkt = std::max(kkt, std::max(0.0, -r[i]) / scale); // needs r_i >= 0
        else
          kkt = std::max(kkt, std::max(0.0, r[i]) / scale); // needs r_i <= 0
      }

    result.values = std::move(x);
    result.kkt_residual = kkt;
    result.n_active_lower = static_cast<int>(std::count(active.begin(), active.end(), int8_t(-1)));
    result.n_active_upper = static_cast<int>(std::count(active.begin(), active.end(), int8_t(1)));

    if (kkt > kkt_tolerance)
      throw SolverError("bound_void_fraction: KKT residual " + std::to_string(kkt) +
                        " exceeds tolerance");
    return result;
  }

  double field_integral(const FeSpace &space, const Vector &values)
  {
    const Mesh &mesh = space.mesh();
    const QuadratureRule rule = gauss_rule(mesh.dim, space.degree() + 1);
    const BasisTable basis = build_basis_table(mesh.dim, space.degree(), rule, mesh.cell_size);

    double integral = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c)
      {
        const auto &dofs = space.cell_dofs(c);
        const double jac = mesh.cell_measures[c];
        for (int q = 0; q < rule.size(); ++q)
          {
            double v = 0.0;
            for (size_t j = 0; j < dofs.size(); ++j)
              v += values[dofs[j]] * basis.value[q][j];
            integral += rule.weights[q] * jac * v;
          }
      }
    return integral;
  }

  VoidFractionResult compute_void_fraction(const FeSpace &space,
                                           const ParticleSet &particles,
                                           const VoidFractionOptions &options)
  {
    VoidFractionResult result;
    result.pcm = pcm_cell_values(space.mesh(), particles);

    const ProjectionSystem system =
      build_projection_system(space, result.pcm.cell_values, options.smoothing_length_sq);

    Vector projected = project_void_fraction(system);
    result.rhs_mass = system.rhs_mass;
    result.projected_mass = field_integral(space, projected);

    if (options.bound)
      {
        ActiveSetResult bounded = bound_void_fraction(system, options.lower_bound, options.upper_bound);
        result.active_set_iterations = bounded.iterations;
        result.kkt_residual = bounded.kkt_residual;
        result.n_active_lower = bounded.n_active_lower;
        result.n_active_upper = bounded.n_active_upper;
        result.values = std::move(bounded.values);
      }
    else
      result.values = std::move(projected);

    result.bounded_mass = field_integral(space, result.values);
    result.bounding_mass_defect =
      std::abs(result.bounded_mass - result.projected_mass) / std::max(std::abs(result.projected_mass), 1e-300);
    result.min_value = result.values.minCoeff();
    result.max_value = result.values.maxCoeff();
    return result;
  }

  VoidFractionData VoidFractionData::constant(const FeSpace &space, double value)
  {
    VoidFractionData data;
    data.space = &space;
    data.values = Vector::Constant(space.n_dofs(), value);
    data.prev1 = data.values;
    data.prev2 = data.values;
    data.dt_mode = EpsDtMode::zero;
    return data;
  }

  void VoidFractionData::push_history()
  {
    prev2 = prev1;
    prev1 = values;
  }

  double step_void_fraction(const Vec3 &p)
  {
    return (p[0] < -0.5 || p[0] > 0.5) ? 1.0 : 0.5;
  }
} // namespace vans
