#include <vans/packed_bed.hpp>
#include <vans/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace vans
{
  namespace
  {
    // Portable uniform deviates: the standard distributions are not pinned
    // across library implementations, and packings must reproduce bitwise
    // from a seed.
    double uniform_unit(std::mt19937_64 &rng)
    {
      return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t n)
    {
      return rng() % n; // modulo bias is irrelevant at these ranges
    }

    double particle_volume_3d(double diameter)
    {
      return M_PI * diameter * diameter * diameter / 6.0;
    }

    void validate_packing_config(const BedConfig &config)
    {
      if (config.particle_diameter <= 0.0)
        throw ConfigError("generate_packing: particle diameter must be positive");
      if (config.target_void_fraction <= 0.0 || config.target_void_fraction >= 1.0)
        throw ConfigError("generate_packing: target void fraction must lie in (0,1)");
      if (config.packing_z_min >= config.packing_z_max)
        throw ConfigError("generate_packing: empty packing z-range");
      if (config.packing_z_min < config.duct_lower[2] - 1e-12 ||
          config.packing_z_max > config.duct_upper[2] + 1e-12)
        throw ConfigError("generate_packing: packing z-range leaves the duct");
      for (int a = 0; a < 2; ++a)
        if (config.duct_upper[a] - config.duct_lower[a] < config.particle_diameter)
          throw ConfigError("generate_packing: duct cross-section narrower than a particle");

      // Jittered simple-cubic packings cannot get denser than touching
      // spheres on the cubic lattice.
      const double sc_limit = 1.0 - M_PI / 6.0;
      if (config.target_void_fraction < sc_limit - 1e-6)
        {
          std::ostringstream msg;
          msg << "generate_packing: target void fraction " << config.target_void_fraction
              << " is below the simple-cubic limit " << sc_limit;
          throw ConfigError(msg.str());
        }
    }
  } // namespace

  double bed_smoothing_length_sq(const BedConfig &config)
  {
    if (config.smoothing_length_sq >= 0.0)
      return config.smoothing_length_sq;
    // On this duct the packing occupies 40 mm, so a multi-diameter smoothing
    // length erodes a sizable fraction of the bed: the ramps at both packing
    // ends soften the void fraction the drag closure sees and the predicted
    // pressure drop falls well below the Ergun band. The cell-binned field is
    // already averaged over ~8 particles per cell, so only a short length is
    // needed to round off the binning noise.
    return 0.25 * config.particle_diameter * config.particle_diameter;
  }

  ParticleSet generate_packing(const BedConfig &config)
  {
    validate_packing_config(config);

    const double d = config.particle_diameter;
    const double v_p = particle_volume_3d(d);
    const double lx = config.duct_upper[0] - config.duct_lower[0];
    const double ly = config.duct_upper[1] - config.duct_lower[1];
    const double lz = config.packing_z_max - config.packing_z_min;
    const double v_pack = lx * ly * lz;

    const long long n_p = std::llround((1.0 - config.target_void_fraction) * v_pack / v_p);
    ParticleSet particles;
    if (n_p <= 0)
      return particles;

    // Near-cubic lattice whose site count covers the particle count; extra
    // sites are dropped at random so the count is exact. Counts round up, so
    // the spacing never exceeds the void-fraction estimate and near-touching
    // targets snap to exact multiples of the diameter instead of beating
    // against the flow mesh in the centroid binning.
    const double a0 = std::cbrt(v_pack / static_cast<double>(n_p));
    const double extent[3] = {lx, ly, lz};
    long long n[3];
    for (int a = 0; a < 3; ++a)
      n[a] = std::max(1ll, static_cast<long long>(std::ceil(extent[a] / a0 - 1e-9)));
    while (n[0] * n[1] * n[2] < n_p)
      {
        int widest = 0;
        for (int a = 1; a < 3; ++a)
          if (extent[a] / static_cast<double>(n[a]) > extent[widest] / static_cast<double>(n[widest]))
            widest = a;
        ++n[widest];
      }

    double spacing[3];
    for (int a = 0; a < 3; ++a)
      {
        spacing[a] = extent[a] / static_cast<double>(n[a]);
        if (spacing[a] < d * (1.0 - 1e-6))
          {
            std::ostringstream msg;
            msg << "generate_packing: target void fraction " << config.target_void_fraction
                << " needs lattice spacing " << spacing[a] << " below the particle diameter " << d;
            throw ConfigError(msg.str());
          }
      }

    double jitter[3];
    for (int a = 0; a < 3; ++a)
      jitter[a] = std::max(0.0, std::min(0.2 * spacing[a], 0.5 * (spacing[a] - d)));

    const long long n_sites = n[0] * n[1] * n[2];
    std::mt19937_64 rng(config.seed);

    // Partial Fisher-Yates selects the dropped sites.
    std::vector<char> keep(static_cast<size_t>(n_sites), 1);
    if (n_sites > n_p)
      {
        std::vector<std::int64_t> idx(static_cast<size_t>(n_sites));
        for (std::int64_t s = 0; s < n_sites; ++s)
          idx[static_cast<size_t>(s)] = s;
        const long long n_drop = n_sites - n_p;
        for (long long t = 0; t < n_drop; ++t)
          {
            const std::uint64_t j =
              static_cast<std::uint64_t>(t) + uniform_below(rng, static_cast<std::uint64_t>(n_sites - t));
            std::swap(idx[static_cast<size_t>(t)], idx[static_cast<size_t>(j)]);
            keep[static_cast<size_t>(idx[static_cast<size_t>(t)])] = 0;
          }
      }

    const Vec3 base(config.duct_lower[0], config.duct_lower[1], config.packing_z_min);
    for (long long k = 0, s = 0; k < n[2]; ++k)
      for (long long j = 0; j < n[1]; ++j)
        for (long long i = 0; i < n[0]; ++i, ++s)
          {
            if (!keep[static_cast<size_t>(s)])
              continue;
            Vec3 center = base;
            center[0] += (static_cast<double>(i) + 0.5) * spacing[0];
            center[1] += (static_cast<double>(j) + 0.5) * spacing[1];
            center[2] += (static_cast<double>(k) + 0.5) * spacing[2];
            for (int a = 0; a < 3; ++a)
              if (jitter[a] > 0.0)
                center[a] += (2.0 * uniform_unit(rng) - 1.0) * jitter[a];
            particles.add(center, 0.5 * d);
          }

    const double achieved = packing_void_fraction(config, particles.size());
    if (std::abs(achieved - config.target_void_fraction) > 0.005)
      {
        std::ostringstream msg;
        msg << "generate_packing: achieved void fraction " << achieved
            << " misses the target " << config.target_void_fraction;
        throw ConfigError(msg.str());
      }
    return particles;
  }

  double packing_void_fraction(const BedConfig &config, int n_particles)
  {
    const double v_pack = (config.duct_upper[0] - config.duct_lower[0]) *
                          (config.duct_upper[1] - config.duct_lower[1]) *
                          (config.packing_z_max - config.packing_z_min);
    return 1.0 - n_particles * particle_volume_3d(config.particle_diameter) / v_pack;
  }

  double packing_bed_height(const BedConfig &config, int n_particles, double void_fraction)
  {
    const double a_duct = (config.duct_upper[0] - config.duct_lower[0]) *
                          (config.duct_upper[1] - config.duct_lower[1]);
    return n_particles * particle_volume_3d(config.particle_diameter) /
           ((1.0 - void_fraction) * a_duct);
  }

  double ergun_pressure_drop(double void_fraction,
                             double superficial_velocity,
                             double mu_f,
                             double rho_f,
                             double bed_height,
                             double particle_diameter,
                             bool quadratic_inertial)
  {
    if (void_fraction <= 0.0 || void_fraction >= 1.0)
      throw DomainError("ergun_pressure_drop: void fraction must lie in (0,1)");
    if (superficial_velocity < 0.0)
      throw DomainError("ergun_pressure_drop: superficial velocity must be nonnegative");

    const double eps = void_fraction;
    const double u = superficial_velocity;
    const double one_minus = 1.0 - eps;
    const double eps3 = eps * eps * eps;

    const double viscous = 150.0 * one_minus * one_minus * u * mu_f * bed_height /
                           (eps3 * particle_diameter * particle_diameter);
    const double inertial_u = quadratic_inertial ? u * u : u;
    const double inertial =
      1.75 * one_minus * rho_f * inertial_u * bed_height / (eps3 * particle_diameter);
    return viscous + inertial;
  }

  WenYuResult wen_yu_umf(double rho_f, double rho_p, double particle_diameter, double mu_f, double g)
  {
    if (rho_p < rho_f)
      throw DomainError("wen_yu_umf: particle density below fluid density");
    if (mu_f <= 0.0 || rho_f <= 0.0 || particle_diameter <= 0.0)
      throw DomainError("wen_yu_umf: fluid properties and diameter must be positive");

    WenYuResult result;
    result.ar = g * rho_f * (rho_p - rho_f) * std::pow(particle_diameter, 3) / (mu_f * mu_f);
    result.u_mf = (std::sqrt(33.7 * 33.7 + 0.0408 * result.ar) - 33.7) * mu_f /
                  (rho_f * particle_diameter);
    return result;
  }

  namespace
  {
    // Area-averaged pressure over the horizontal plane at height z,
    // kinematic units.
    double plane_average_pressure(const SolutionState &state, double z)
    {
      const FeSpace &P = *state.pressure_space;
      const Mesh &mesh = P.mesh();
      if (mesh.dim != 3)
        throw ConfigError("measure_pressure_drop: needs a 3D mesh");
      if (z < mesh.lower[2] - 1e-12 || z > mesh.upper[2] + 1e-12)
        throw ConfigError("measure_pressure_drop: sample plane outside the mesh");

      const int layer = std::min(mesh.subdivisions[2] - 1,
                                 std::max(0, static_cast<int>((z - mesh.lower[2]) / mesh.cell_size[2])));

      std::vector<double> q1d, w1d;
      gauss_points_1d(P.degree() + 1, q1d, w1d);

      const Lagrange1d basis_1d(P.degree());
      std::vector<double> value;
      std::vector<Vec3> grad;
      std::vector<double> laplace;

      double sum = 0.0;
      for (int j = 0; j < mesh.subdivisions[1]; ++j)
        for (int i = 0; i < mesh.subdivisions[0]; ++i)
          {
            const int cell = mesh.cell_id(i, j, layer);
            const Vec3 lower = mesh.cell_lower(cell);
            const double ref_z = (z - lower[2]) / mesh.cell_size[2];
            const auto &dofs = P.cell_dofs(cell);
            for (size_t qy = 0; qy < q1d.size(); ++qy)
              for (size_t qx = 0; qx < q1d.size(); ++qx)
                {
                  const Vec3 ref(q1d[qx], q1d[qy], ref_z);
                  tensor_basis_at(basis_1d, 3, ref, mesh.cell_size, value, grad, laplace);
                  double p = 0.0;
                  for (size_t a = 0; a < dofs.size(); ++a)
                    p += state.x[state.pressure_dof(dofs[a])] * value[a];
                  sum += w1d[qx] * w1d[qy] * p; // reference weights, cell area cancels
                }
          }
      return sum / (mesh.subdivisions[0] * mesh.subdivisions[1]);
    }
  } // namespace

  double measure_pressure_drop(const SolutionState &state, double rho_f, double z_low, double z_high)
  {
    return rho_f * (plane_average_pressure(state, z_low) - plane_average_pressure(state, z_high));
  }

  BedReport run_bed_sweep(const BedConfig &config, const BedRowCallback &on_row)
  {
    for (int a = 0; a < 3; ++a)
      if (config.subdivisions[a] < 1)
        throw ConfigError("run_bed_sweep: mesh subdivisions must be positive");
    if (config.dt <= 0.0 || config.t_end < config.dt)
      throw ConfigError("run_bed_sweep: need 0 < dt <= t_end");
    if (config.rho_f <= 0.0 || config.mu_f <= 0.0)
      throw ConfigError("run_bed_sweep: fluid properties must be positive");

    const Mesh mesh = build_box_mesh(3, config.subdivisions, config.duct_lower, config.duct_upper);
    const FeSpace V(mesh, config.velocity_degree);
    const FeSpace P(mesh, config.pressure_degree);
    const FeSpace E(mesh, 1);

    BedReport report;

    const double min_cell = std::min({mesh.cell_size[0], mesh.cell_size[1], mesh.cell_size[2]});
    if (config.particle_diameter > min_cell / 3.0)
      {
        std::ostringstream msg;
        msg << "particle diameter " << config.particle_diameter
            << " exceeds a third of the cell size " << min_cell;
        report.warnings.push_back(msg.str());
      }

    const ParticleSet particles = generate_packing(config);
    report.n_particles = particles.size();
    report.achieved_void_fraction = packing_void_fraction(config, particles.size());
    report.bed_height =
      packing_bed_height(config, particles.size(), report.achieved_void_fraction);

    const WenYuResult wen_yu = wen_yu_umf(config.rho_f, config.particle_density,
                                          config.particle_diameter, config.mu_f, config.gravity);
    report.u_mf = wen_yu.u_mf;
    report.archimedes = wen_yu.ar;

    VoidFractionOptions vf_options;
    vf_options.smoothing_length_sq = bed_smoothing_length_sq(config);
    vf_options.bound = config.bound_void_fraction;
    vf_options.lower_bound = config.bound_lower;
    vf_options.upper_bound = config.bound_upper;
    const VoidFractionResult vf = compute_void_fraction(E, particles, vf_options);

    const double rhs_mass = std::max(std::abs(vf.rhs_mass), 1e-300);
    report.mass_defect = std::abs(vf.bounded_mass - vf.rhs_mass) / rhs_mass;
    report.unbounded_mass_defect = std::abs(vf.projected_mass - vf.rhs_mass) / rhs_mass;

    VoidFractionData eps_data;
    eps_data.space = &E;
    eps_data.values = vf.values;
    eps_data.prev1 = vf.values;
    eps_data.prev2 = vf.values;
    eps_data.dt_mode = EpsDtMode::zero;

    DragSettings drag_settings;
    drag_settings.model = config.drag;
    drag_settings.rho_f = config.rho_f;
    drag_settings.mu_f = config.mu_f;
    drag_settings.scale_by_inverse_void_fraction = (config.form == VansForm::b);

    const double z_low = config.sample_z_low >= 0.0
                           ? config.sample_z_low
                           : 0.5 * (config.duct_lower[2] + config.packing_z_min);
    const double z_high = config.sample_z_high >= 0.0
                            ? config.sample_z_high
                            : 0.5 * (config.packing_z_max + config.duct_upper[2]);

    VansConfig flow;
    flow.form = config.form;
    flow.viscosity = config.mu_f / config.rho_f;
    flow.density = config.rho_f;
    flow.transient = true;
    flow.bdf = BdfScheme(1);
    flow.dt = config.dt;
    flow.newton = config.newton;
    flow.linear = config.linear;
    flow.n_threads = config.n_threads;

    for (double u_in : config.inlet_velocities)
      {
        if (u_in >= report.u_mf)
          {
            std::ostringstream msg;
            msg << "inlet velocity " << u_in << " is at or above the minimum fluidization velocity "
                << report.u_mf;
            report.warnings.push_back(msg.str());
          }

        std::vector<VelocityBc> bcs;
        VelocityBc inlet;
        inlet.tag = 4;
        inlet.kind = BcKind::dirichlet;
        inlet.value = [u_in](const Vec3 &, double) { return Vec3(0.0, 0.0, u_in); };
        bcs.push_back(inlet);
        for (int tag = 0; tag < 4; ++tag)
          {
            VelocityBc wall;
            wall.tag = tag;
            wall.kind = BcKind::slip;
            bcs.push_back(wall);
          }
        VelocityBc outlet;
        outlet.tag = 5;
        outlet.kind = BcKind::outflow;
        bcs.push_back(outlet);

        SolutionState state(V, P);

        BedRow row;
        row.u_in = u_in;
        row.re_bed = config.rho_f * u_in * (config.duct_upper[0] - config.duct_lower[0]) / config.mu_f;
        row.dp_ergun = ergun_pressure_drop(report.achieved_void_fraction, u_in, config.mu_f,
                                           config.rho_f, report.bed_height,
                                           config.particle_diameter);

        const int n_steps = static_cast<int>(std::llround(config.t_end / config.dt));
        double dp_prev = 0.0;
        for (int step = 0; step < n_steps; ++step)
          {
            const std::vector<CellDrag> drag =
              build_cell_drag(particles, state, eps_data, drag_settings);
            try
              {
                advance_time_step(state, flow, eps_data, &drag, bcs);
              }
            catch (const SolverError &err)
              {
                std::ostringstream msg;
                msg << "u_in = " << u_in << ": " << err.what();
                report.warnings.push_back(msg.str());
                row.converged = false;
                break;
              }
            ++row.steps;

            const double dp = measure_pressure_drop(state, config.rho_f, z_low, z_high);
            if (row.steps >= 3 &&
                std::abs(dp - dp_prev) <= config.steady_rel_tol * std::max(std::abs(dp), 1e-12))
              {
                row.dp_sim = dp;
                break;
              }
            dp_prev = dp;
            row.dp_sim = dp;
          }

        const MassConservationReport mass = mass_conservation_report(state, flow, eps_data);
        const double scale = u_in > 0.0 ? u_in : 1.0;
        row.mass_global = mass.global_source / scale;
        row.mass_local_max = mass.max_local_source / scale;

        report.rows.push_back(row);
        if (on_row)
          on_row(row, state, eps_data);
      }
    return report;
  }

  void write_bed_csv(const BedReport &report, const std::string &path)
  {
    std::ofstream out(path);
    if (!out)
      throw IoError("write_bed_csv: cannot open '" + path + "'");
    out.precision(16);
    out << "u_in,re_bed,dp_sim,dp_ergun,mass_global,mass_local_max\n";
    for (const BedRow &row : report.rows)
      out << row.u_in << ',' << row.re_bed << ',' << row.dp_sim << ',' << row.dp_ergun << ','
          << row.mass_global << ',' << row.mass_local_max << '\n';
    if (!out)
      throw IoError("write_bed_csv: write failed for '" + path + "'");
  }
} // namespace vans
