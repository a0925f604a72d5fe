#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vans/drag.hpp>

#include <cmath>

using namespace vans;

TEST_CASE("particle reynolds number uses the superficial slip")
{
  CHECK(particle_reynolds(1.0, 0.8, 2.0, 0.5, 0.1) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(particle_reynolds(1.2, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.2));
  CHECK_THROWS_AS(particle_reynolds(1.0, 0.5, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("drag coefficients at the bump peak match hand values")
{
  // At Re = 10^1.5 the log-gaussian factor is exactly 1, so the exponents are
  // 3.05 and, for eps = 0.8, 3.17. Values below were worked out from the
  // closure pieces by hand.
  const double re = std::pow(10.0, 1.5);
  CHECK(cd_difelice(re, 0.8) == doctest::Approx(2.782108154973625).epsilon(1e-12));
  CHECK(cd_rong(re, 0.8) == doctest::Approx(2.85761167017978).epsilon(1e-12));

  CHECK_THROWS_AS(cd_difelice(0.0, 0.8), DomainError);
  CHECK_THROWS_AS(cd_rong(10.0, 0.0), DomainError);
}

TEST_CASE("both closures collapse to the single-particle curve at eps = 1")
{
  for (double re : {0.1, 1.0, 31.622776601683793, 1000.0})
    {
      const double base = std::pow(0.63 + 4.8 / std::sqrt(re), 2);
      CHECK(std::abs(cd_difelice(re, 1.0) - cd_rong(re, 1.0)) <= 1e-14 * base);
      CHECK(cd_difelice(re, 1.0) == doctest::Approx(base).epsilon(1e-14));
    }
}

TEST_CASE("crowding raises the drag coefficient")
{
  for (double re : {1.0, 100.0})
    {
      CHECK(cd_difelice(re, 0.5) > cd_difelice(re, 0.9));
      CHECK(cd_rong(re, 0.5) > cd_rong(re, 0.9));
    }
}

TEST_CASE("model names parse")
{
  CHECK(drag_model_from_string("difelice") == DragModel::difelice);
  CHECK(drag_model_from_string("rong") == DragModel::rong);
  CHECK(drag_model_from_string("none") == DragModel::none);
  CHECK_THROWS_AS(drag_model_from_string("gidaspow"), ConfigError);
}

namespace
{
  struct DragFixture
  {
    Mesh mesh = build_box_mesh(3, {1, 1, 1}, Vec3(0, 0, 0), Vec3(1, 1, 1));
    FeSpace vel{mesh, 1};
    FeSpace pres{mesh, 1};
    FeSpace eps_space{mesh, 1};
    SolutionState state{vel, pres};

    DragFixture(double u_x)
    {
      state.interpolate([u_x](const Vec3 &) { return Vec3(u_x, 0.0, 0.0); },
                        [](const Vec3 &) { return 0.0; });
    }
  };
} // namespace

TEST_CASE("a single resting particle produces the hand-computed coefficient")
{
  DragFixture fix(2.0);
  const VoidFractionData eps = VoidFractionData::constant(fix.eps_space, 0.8);

  ParticleSet particles;
  particles.add(Vec3(0.5, 0.5, 0.5), 0.05);

  DragSettings settings;
  settings.model = DragModel::difelice;
  settings.rho_f = 1.0;
  settings.mu_f = 0.1;

  const auto cells = build_cell_drag(particles, fix.state, eps, settings);
  REQUIRE(cells.size() == 1);
  // Re = 0.8 * 2 * 0.1 / 0.1 = 1.6; strength = cd/2 * pi r^2 * |slip| / V.
  const double cd = cd_difelice(1.6, 0.8);
  const double expected = 0.5 * cd * M_PI * 0.05 * 0.05 * 2.0;
  CHECK(cells[0].coefficient == doctest::Approx(expected).epsilon(1e-12));
  CHECK(cells[0].reference_velocity.norm() == doctest::Approx(0.0));

  // Scaling by the inverse void fraction divides the same coefficient, so
  // eps * scaled == unscaled to roundoff.
  settings.scale_by_inverse_void_fraction = true;
  const auto scaled = build_cell_drag(particles, fix.state, eps, settings);
  CHECK(std::abs(scaled[0].coefficient * 0.8 - cells[0].coefficient) <=
        1e-14 * cells[0].coefficient);
}

TEST_CASE("models coincide cell-wise in pure fluid")
{
  DragFixture fix(1.3);
  const VoidFractionData eps = VoidFractionData::constant(fix.eps_space, 1.0);

  ParticleSet particles;
  particles.add(Vec3(0.25, 0.5, 0.5), 0.04, Vec3(0.3, 0.0, 0.0));
  particles.add(Vec3(0.75, 0.5, 0.5), 0.06, Vec3(-0.2, 0.1, 0.0));

  DragSettings settings;
  settings.rho_f = 1.0;
  settings.mu_f = 0.01;

  settings.model = DragModel::difelice;
  const auto a = build_cell_drag(particles, fix.state, eps, settings);
  settings.model = DragModel::rong;
  const auto b = build_cell_drag(particles, fix.state, eps, settings);
  REQUIRE(a.size() == b.size());
  CHECK(std::abs(a[0].coefficient - b[0].coefficient) <= 1e-14 * a[0].coefficient);
}

TEST_CASE("the cell reaction reproduces the per-particle force sum")
{
  // Two particles with different radii and velocities in one cell: the
  // aggregated coefficient and reference velocity must reproduce the summed
  // individual reactions for the cell-constant fluid velocity.
  DragFixture fix(1.0);
  const VoidFractionData eps = VoidFractionData::constant(fix.eps_space, 0.9);

  ParticleSet particles;
  particles.add(Vec3(0.3, 0.5, 0.5), 0.05, Vec3(0.5, 0.0, 0.0));
  particles.add(Vec3(0.7, 0.5, 0.5), 0.08, Vec3(-1.0, 0.0, 0.0));

  DragSettings settings;
  settings.model = DragModel::difelice;
  settings.rho_f = 1.0;
  settings.mu_f = 0.01;

  const auto cells = build_cell_drag(particles, fix.state, eps, settings);

  double strength_sum = 0.0, force_sum = 0.0;
  for (int p = 0; p < particles.size(); ++p)
    {
      const double slip = std::abs(1.0 - particles.velocity[p][0]);
      const double re = particle_reynolds(1.0, 0.9, slip, 2.0 * particles.radius[p], 0.01);
      const double cd = cd_difelice(re, 0.9);
      const double s = 0.5 * cd * M_PI * particles.radius[p] * particles.radius[p] * slip;
      strength_sum += s;
      force_sum += s * (1.0 - particles.velocity[p][0]);
    }
  CHECK(cells[0].coefficient == doctest::Approx(strength_sum).epsilon(1e-12));
  const double aggregated =
    cells[0].coefficient * (1.0 - cells[0].reference_velocity[0]);
  CHECK(aggregated == doctest::Approx(force_sum).epsilon(1e-12));
}

TEST_CASE("resting fluid against resting particles produces no reaction")
{
  DragFixture fix(0.0);
  const VoidFractionData eps = VoidFractionData::constant(fix.eps_space, 0.7);

  ParticleSet particles;
  particles.add(Vec3(0.5, 0.5, 0.5), 0.05);

  DragSettings settings;
  settings.model = DragModel::rong;
  const auto cells = build_cell_drag(particles, fix.state, eps, settings);
  CHECK(cells[0].coefficient == doctest::Approx(0.0));
}

TEST_CASE("particles outside the mesh are ignored")
{
  DragFixture fix(1.0);
  const VoidFractionData eps = VoidFractionData::constant(fix.eps_space, 0.8);

  ParticleSet particles;
  particles.add(Vec3(5.0, 5.0, 5.0), 0.05);

  DragSettings settings;
  settings.model = DragModel::difelice;
  settings.mu_f = 0.01;
  const auto cells = build_cell_drag(particles, fix.state, eps, settings);
  CHECK(cells[0].coefficient == doctest::Approx(0.0));

  DragSettings bad = settings;
  bad.mu_f = 0.0;
  CHECK_THROWS_AS(build_cell_drag(particles, fix.state, eps, bad), ConfigError);
}
