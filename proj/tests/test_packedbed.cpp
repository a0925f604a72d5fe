#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vans/packed_bed.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

using namespace vans;

namespace
{
  BedConfig desk_config()
  {
    return BedConfig{}; // the defaults are the desk-scale duct
  }
} // namespace

TEST_CASE("ergun correlation matches the hand-evaluated reference point")
{
  // 150*(0.6)^2*0.1*1e-5*0.08/(0.4^3*1e-6) = 67.5 and
  // 1.75*0.6*1*0.01*0.08/(0.4^3*1e-3) = 13.125.
  CHECK(ergun_pressure_drop(0.4, 0.1, 1e-5, 1.0, 0.08, 1e-3) ==
        doctest::Approx(80.625).epsilon(1e-12));
  // The variant with a linear inertial term swaps 13.125 for 131.25.
  CHECK(ergun_pressure_drop(0.4, 0.1, 1e-5, 1.0, 0.08, 1e-3, false) ==
        doctest::Approx(198.75).epsilon(1e-12));

  CHECK(ergun_pressure_drop(0.4, 0.0, 1e-5, 1.0, 0.08, 1e-3) == 0.0);
  CHECK(ergun_pressure_drop(1.0 - 1e-12, 0.1, 1e-5, 1.0, 0.08, 1e-3) ==
        doctest::Approx(0.0).epsilon(1e-6));

  // Monotone in the superficial velocity.
  double prev = 0.0;
  for (double u = 0.05; u <= 0.35; u += 0.05)
    {
      const double dp = ergun_pressure_drop(0.5, u, 1e-5, 1.0, 0.04, 1e-3);
      CHECK(dp > prev);
      prev = dp;
    }

  CHECK_THROWS_AS(ergun_pressure_drop(0.0, 0.1, 1e-5, 1.0, 0.08, 1e-3), DomainError);
  CHECK_THROWS_AS(ergun_pressure_drop(1.0, 0.1, 1e-5, 1.0, 0.08, 1e-3), DomainError);
  CHECK_THROWS_AS(ergun_pressure_drop(0.4, -0.1, 1e-5, 1.0, 0.08, 1e-3), DomainError);
}

TEST_CASE("wen yu minimum fluidization velocity and archimedes number")
{
  // Ar = 9.81*1*2499*1e-9/1e-10, U_mf = (sqrt(33.7^2 + 0.0408 Ar) - 33.7)*mu/(rho d).
  const WenYuResult wy = wen_yu_umf(1.0, 2500.0, 1e-3, 1e-5, 9.81);
  CHECK(wy.ar == doctest::Approx(245151.9).epsilon(1e-12));
  CHECK(wy.u_mf == doctest::Approx(0.7183619056987041).epsilon(1e-12));

  const WenYuResult neutral = wen_yu_umf(1.0, 1.0, 1e-3, 1e-5, 9.81);
  CHECK(neutral.ar == 0.0);
  CHECK(neutral.u_mf == 0.0);

  CHECK_THROWS_AS(wen_yu_umf(2.0, 1.0, 1e-3, 1e-5, 9.81), DomainError);
  CHECK_THROWS_AS(wen_yu_umf(1.0, 2500.0, 1e-3, 0.0, 9.81), DomainError);
}

TEST_CASE("packing generator fills the desk bed with the booked particle count")
{
  const BedConfig config = desk_config();
  const ParticleSet particles = generate_packing(config);

  // round(0.5 * 4e-6 / (pi/6 * 1e-9)) spheres.
  CHECK(particles.size() == 3820);
  CHECK(packing_void_fraction(config, particles.size()) ==
        doctest::Approx(0.4999631693036246).epsilon(1e-12));
  CHECK(std::abs(packing_void_fraction(config, particles.size()) - config.target_void_fraction) <
        0.005);
  CHECK(packing_bed_height(config, particles.size(),
                           packing_void_fraction(config, particles.size())) ==
        doctest::Approx(0.04).epsilon(1e-12));

  // The desk lattice has zero jitter headroom across the cross-section, so
  // x and y sit exactly on the 1 mm lattice; z keeps a little slack but must
  // stay inside the packing band.
  for (int p = 0; p < particles.size(); ++p)
    {
      const Vec3 &x = particles.position[p];
      const double fx = std::fmod(x[0] - 0.0005, 1e-3);
      const double fy = std::fmod(x[1] - 0.0005, 1e-3);
      CHECK(std::min(std::abs(fx), std::abs(1e-3 - std::abs(fx))) < 1e-15);
      CHECK(std::min(std::abs(fy), std::abs(1e-3 - std::abs(fy))) < 1e-15);
      CHECK(x[2] > config.packing_z_min);
      CHECK(x[2] < config.packing_z_max);
      CHECK(particles.radius[p] == 0.5e-3);
      CHECK(particles.velocity[p].norm() == 0.0);
    }
}

TEST_CASE("packing is deterministic for a fixed seed and moves with it")
{
  BedConfig config = desk_config();
  config.target_void_fraction = 0.6;
  config.seed = 42;

  const ParticleSet a = generate_packing(config);
  const ParticleSet b = generate_packing(config);
  REQUIRE(a.size() == b.size());
  for (int p = 0; p < a.size(); ++p)
    {
      CHECK(a.position[p] == b.position[p]);
      CHECK(a.radius[p] == b.radius[p]);
    }

  config.seed = 43;
  const ParticleSet c = generate_packing(config);
  REQUIRE(c.size() == a.size());
  bool any_moved = false;
  for (int p = 0; p < a.size() && !any_moved; ++p)
    any_moved = (a.position[p] - c.position[p]).norm() > 0.0;
  CHECK(any_moved);
}

TEST_CASE("the simple-cubic density limit gives the exact touching lattice")
{
  BedConfig config = desk_config();
  config.target_void_fraction = 1.0 - M_PI / 6.0;

  const ParticleSet particles = generate_packing(config);
  REQUIRE(particles.size() == 4000); // 10 x 10 x 40 sites, none dropped

  // Zero jitter headroom everywhere: every center sits on the lattice.
  CHECK(particles.position[0][0] == doctest::Approx(0.0005).epsilon(1e-14));
  CHECK(particles.position[0][1] == doctest::Approx(0.0005).epsilon(1e-14));
  CHECK(particles.position[0][2] == doctest::Approx(0.0105).epsilon(1e-14));
  // Touching neighbors along x.
  CHECK((particles.position[1] - particles.position[0]).norm() ==
        doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("jittered packings stay overlap free")
{
  BedConfig config = desk_config();
  config.target_void_fraction = 0.6;
  const ParticleSet particles = generate_packing(config);
  const double d = config.particle_diameter;

  // Sort by z and scan the sliding window that can still collide.
  std::vector<int> order(particles.size());
  for (int p = 0; p < particles.size(); ++p)
    order[p] = p;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return particles.position[a][2] < particles.position[b][2];
  });

  double min_dist = 1e30;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j)
      {
        if (particles.position[order[j]][2] - particles.position[order[i]][2] >= d)
          break;
        min_dist =
          std::min(min_dist, (particles.position[order[i]] - particles.position[order[j]]).norm());
      }
  CHECK(min_dist >= d - 1e-12);
}

TEST_CASE("unachievable packing targets are rejected")
{
  BedConfig config = desk_config();

  config.target_void_fraction = 0.3; // denser than touching spheres
  CHECK_THROWS_AS(generate_packing(config), ConfigError);

  config.target_void_fraction = 0.45; // feasible density, no integer lattice fits
  CHECK_THROWS_AS(generate_packing(config), ConfigError);

  config.target_void_fraction = 1.5;
  CHECK_THROWS_AS(generate_packing(config), ConfigError);

  config = desk_config();
  config.packing_z_min = 0.05;
  config.packing_z_max = 0.01;
  CHECK_THROWS_AS(generate_packing(config), ConfigError);

  config = desk_config();
  config.packing_z_max = 0.08; // beyond the duct
  CHECK_THROWS_AS(generate_packing(config), ConfigError);
}

TEST_CASE("plane averaged pressure drop reads a linear field exactly")
{
  const Mesh mesh = build_box_mesh(3, {2, 2, 4}, Vec3::Zero(), Vec3(1.0, 1.0, 1.0));
  const FeSpace V(mesh, 1);
  const FeSpace P(mesh, 1);
  SolutionState state(V, P);

  for (int i = 0; i < P.n_dofs(); ++i)
    state.x[state.pressure_dof(i)] = 1.0 - 10.0 * P.support_point(i)[2];

  // p_bar(0.25) - p_bar(0.75) = 5, doubled by rho_f = 2.
  CHECK(measure_pressure_drop(state, 2.0, 0.25, 0.75) == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(measure_pressure_drop(state, 1.0, 0.1, 0.1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(measure_pressure_drop(state, 1.0, -0.5, 0.75), ConfigError);
}

TEST_CASE("an empty duct carries plug flow with negligible pressure drop")
{
  // No particles, unit void fraction, slip walls: the inlet plug convects
  // through and the measured drop is numerical noise, far below the Ergun
  // scale of a packed bed.
  const Mesh mesh = build_box_mesh(3, {5, 5, 30}, Vec3::Zero(), Vec3(0.010, 0.010, 0.060));
  const FeSpace V(mesh, 1);
  const FeSpace P(mesh, 1);
  const FeSpace E(mesh, 1);
  SolutionState state(V, P);

  const VoidFractionData eps = VoidFractionData::constant(E, 1.0);

  VansConfig flow;
  flow.form = VansForm::b;
  flow.viscosity = 1e-5;
  flow.density = 1.0;
  flow.transient = true;
  flow.dt = 2e-3;

  std::vector<VelocityBc> bcs;
  VelocityBc inlet;
  inlet.tag = 4;
  inlet.kind = BcKind::dirichlet;
  inlet.value = [](const Vec3 &, double) { return Vec3(0.0, 0.0, 0.1); };
  bcs.push_back(inlet);
  for (int tag = 0; tag < 4; ++tag)
    {
      VelocityBc wall;
      wall.tag = tag;
      wall.kind = BcKind::slip;
      bcs.push_back(wall);
    }

  for (int step = 0; step < 25; ++step)
    advance_time_step(state, flow, eps, nullptr, bcs);

  const double dp = measure_pressure_drop(state, flow.density, 0.005, 0.055);
  CHECK(std::abs(dp) < 1.0); // Ergun for the packed desk bed is ~15 Pa at this u
}

TEST_CASE("desk bed sweep row lands near the ergun correlation")
{
  BedConfig config = desk_config();
  config.inlet_velocities = {0.1};
  config.form = VansForm::b;
  config.drag = DragModel::rong;

  const BedReport report = run_bed_sweep(config);

  CHECK(report.n_particles == 3820);
  CHECK(report.u_mf == doctest::Approx(0.7183619056987041).epsilon(1e-12));
  CHECK(report.archimedes == doctest::Approx(245151.9).epsilon(1e-12));
  CHECK(report.bed_height == doctest::Approx(0.04).epsilon(1e-12));

  // The pinned desk mesh deliberately trips the particle/cell sizing warning.
  bool sizing_warning = false;
  for (const std::string &w : report.warnings)
    sizing_warning = sizing_warning || w.find("particle diameter") != std::string::npos;
  CHECK(sizing_warning);

  REQUIRE(report.rows.size() == 1);
  const BedRow &row = report.rows[0];
  CHECK(row.converged);
  CHECK(row.u_in == 0.1);
  CHECK(row.re_bed == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(row.dp_sim > 0.0);
  CHECK(std::abs(row.dp_sim - row.dp_ergun) <= 0.25 * row.dp_ergun);
  CHECK(std::abs(row.mass_global) < 1e-8);
  CHECK(row.steps >= 3);

  // Unbounded pipeline: the projection conserves the binned mass exactly.
  CHECK(report.unbounded_mass_defect < 1e-12);
  CHECK(report.mass_defect == report.unbounded_mass_defect);
}

TEST_CASE("bounding at marginal overshoot costs projection mass near 1e-6")
{
  // At L^2 = 0.7 d_p^2 the projected field barely exceeds 1 at the packing
  // ends (max ~1.00025), so clipping trims a sliver of mass instead of a
  // chunk: the bounded defect lands at the 1e-6 scale while the unbounded
  // projection conserves mass to solver tolerance.
  BedConfig config = desk_config();
  config.inlet_velocities = {0.1};
  config.smoothing_length_sq = 0.7e-6;

  BedConfig clipped = config;
  clipped.bound_void_fraction = true;

  const BedReport off = run_bed_sweep(config);
  const BedReport on = run_bed_sweep(clipped);

  REQUIRE(off.rows.size() == 1);
  REQUIRE(on.rows.size() == 1);
  CHECK(off.rows[0].converged);
  CHECK(on.rows[0].converged);

  CHECK(off.mass_defect < 1e-12);
  CHECK(on.mass_defect == doctest::Approx(2.047e-6).epsilon(0.25));
  CHECK(on.mass_defect > 1e-7);
  CHECK(on.mass_defect < 1e-5);
  CHECK(on.mass_defect >= 10.0 * on.unbounded_mass_defect);

  // The clip is far too small to move the flow answer.
  CHECK(on.rows[0].dp_sim == doctest::Approx(off.rows[0].dp_sim).epsilon(1e-4));
}

TEST_CASE("bounded projection settles where the primal-dual exchange cycles")
{
  // At L^2 = 0.5 d_p^2 the desk projection overshoots over enough nodes that
  // the primal-dual exchange flip-flops between two active sets; the
  // projected Gauss-Seidel fallback must still deliver a KKT-valid field.
  const BedConfig config = desk_config();
  const Mesh mesh = build_box_mesh(3, config.subdivisions, config.duct_lower, config.duct_upper);
  const FeSpace space(mesh, 1);
  const ParticleSet particles = generate_packing(config);

  VoidFractionOptions options;
  options.smoothing_length_sq = 0.5e-6;
  options.bound = true;
  const VoidFractionResult result = compute_void_fraction(space, particles, options);

  CHECK(result.kkt_residual < 1e-8);
  CHECK(result.n_active_upper > 100);
  CHECK(result.n_active_lower == 0);
  CHECK(result.min_value >= 0.36 - 1e-12);
  CHECK(result.max_value <= 1.0 + 1e-12);

  const double defect = std::abs(result.bounded_mass - result.rhs_mass) / result.rhs_mass;
  CHECK(defect == doctest::Approx(1.051e-3).epsilon(0.05));
}

TEST_CASE("bed report csv writes the pinned header and one line per row")
{
  BedReport report;
  report.rows.push_back({0.1, 100.0, 12.5, 14.0, 1e-10, 3e-9, true, 17});
  report.rows.push_back({0.2, 200.0, 30.0, 31.0, 2e-10, 4e-9, true, 12});

  const std::string path = "bed_report_test.csv";
  write_bed_csv(report, path);

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "u_in,re_bed,dp_sim,dp_ergun,mass_global,mass_local_max");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty())
      ++rows;
  CHECK(rows == 2);
  std::remove(path.c_str());
}
