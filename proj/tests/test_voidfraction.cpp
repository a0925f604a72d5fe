#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vans/void_fraction.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace vans;

TEST_CASE("particle volumes by dimension")
{
  CHECK(particle_volume(0.05, 3) == doctest::Approx(0.0005235987755982989).epsilon(1e-14));
  CHECK(particle_volume(0.1, 2) == doctest::Approx(0.031415926535897934).epsilon(1e-14));
}

TEST_CASE("particle csv roundtrip with header and comments")
{
  const std::string path = "particles_roundtrip_test.csv";
  {
    std::ofstream out(path);
    out << "# packing produced by hand\n";
    out << "x,y,z,r,vx,vy,vz\n";
    out << "0.1,0.2,0.3,0.05,0,0,0\n";
    out << "0.4,0.5,0.6,0.04,1.0,-1.0,0.5\n";
  }
  const ParticleSet read = particles_from_csv(path);
  REQUIRE(read.size() == 2);
  CHECK(read.position[1][2] == doctest::Approx(0.6));
  CHECK(read.radius[0] == doctest::Approx(0.05));
  CHECK(read.velocity[1][0] == doctest::Approx(1.0));

  particles_to_csv(read, path);
  const ParticleSet again = particles_from_csv(path);
  REQUIRE(again.size() == 2);
  CHECK(again.position[0][0] == doctest::Approx(0.1).epsilon(1e-15));
  std::remove(path.c_str());
}

TEST_CASE("malformed particle rows are rejected")
{
  const std::string path = "particles_malformed_test.csv";
  {
    std::ofstream out(path);
    out << "0.1,0.2,0.3,0.05,0,0\n"; // six columns
  }
  CHECK_THROWS_AS(particles_from_csv(path), IoError);
  {
    std::ofstream out(path);
    out << "0.1,0.2,0.3,-0.05,0,0,0\n"; // negative radius
  }
  CHECK_THROWS_AS(particles_from_csv(path), IoError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(particles_from_csv("no_such_particle_file.csv"), IoError);
}

TEST_CASE("centroid binning charges the owning cell and clamps at zero")
{
  const Mesh mesh = build_box_mesh(3, {1, 1, 1}, Vec3(0, 0, 0), Vec3(1, 1, 1));
  ParticleSet particles;
  particles.add(Vec3(0.5, 0.5, 0.5), 0.05);

  const PcmResult pcm = pcm_cell_values(mesh, particles);
  REQUIRE(pcm.cell_values.size() == 1);
  CHECK(pcm.cell_values[0] == doctest::Approx(0.9994764012244017).epsilon(1e-14));
  CHECK(pcm.n_outside == 0);
  CHECK(pcm.binned_solid_volume == doctest::Approx(0.0005235987755982989).epsilon(1e-14));
}

TEST_CASE("binning is half open and skips particles outside the box")
{
  const Mesh mesh = build_box_mesh(3, {2, 1, 1}, Vec3(0, 0, 0), Vec3(2, 1, 1));
  ParticleSet particles;
  particles.add(Vec3(1.0, 0.5, 0.5), 0.1); // on the interior face -> right cell
  particles.add(Vec3(3.0, 0.5, 0.5), 0.1); // outside

  const PcmResult pcm = pcm_cell_values(mesh, particles);
  CHECK(pcm.cell_values[0] == doctest::Approx(1.0));
  CHECK(pcm.cell_values[1] < 1.0);
  CHECK(pcm.n_outside == 1);
}

TEST_CASE("an overfull cell clamps instead of going negative")
{
  const Mesh mesh = build_box_mesh(3, {4, 4, 4}, Vec3(0, 0, 0), Vec3(1, 1, 1));
  ParticleSet particles;
  // Several large particles with centroids in one tiny cell.
  for (int i = 0; i < 4; ++i)
    particles.add(Vec3(0.1, 0.1, 0.1), 0.12);
  const PcmResult pcm = pcm_cell_values(mesh, particles);
  for (double v : pcm.cell_values)
    CHECK(v >= 0.0);
  CHECK(pcm.cell_values[mesh.locate_cell(Vec3(0.1, 0.1, 0.1))] == doctest::Approx(0.0));
}

TEST_CASE("projection reproduces constant data for any smoothing length")
{
  const Mesh mesh = build_box_mesh(2, {4, 4, 1}, Vec3(0, 0, 0), Vec3(1, 1, 0));
  const FeSpace space(mesh, 1);
  const std::vector<double> cells(mesh.n_cells(), 0.6);

  for (double l2 : {0.0, 0.01, 0.5})
    {
      const ProjectionSystem system = build_projection_system(space, cells, l2);
      const Vector eps = project_void_fraction(system);
      for (int i = 0; i < eps.size(); ++i)
        CHECK(eps[i] == doctest::Approx(0.6).epsilon(1e-10));
      CHECK(system.rhs_mass == doctest::Approx(0.6).epsilon(1e-13));
    }
}

TEST_CASE("projection conserves the binned mass exactly")
{
  // The smoothing operator only modifies the left-hand side; row sums of the
  // stiffness part vanish, so the integral of the projected field equals the
  // integral of the cell data.
  const Mesh mesh = build_box_mesh(2, {8, 8, 1}, Vec3(0, 0, 0), Vec3(1, 1, 0));
  const FeSpace space(mesh, 1);
  std::vector<double> cells(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    cells[c] = 0.5 + 0.3 * std::sin(1.7 * c);

  const ProjectionSystem system = build_projection_system(space, cells, 0.02);
  const Vector eps = project_void_fraction(system);
  const double mass = field_integral(space, eps);
  CHECK(std::abs(mass - system.rhs_mass) <= 1e-12 * std::abs(system.rhs_mass));
}

TEST_CASE("active set bounding clips overshoots and satisfies the kkt system")
{
  const Mesh mesh = build_box_mesh(2, {8, 8, 1}, Vec3(0, 0, 0), Vec3(1, 1, 0));
  const FeSpace space(mesh, 1);
  // Alternating slabs of dense packing and voids, far beyond the bounds.
  std::vector<double> cells(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    cells[c] = (mesh.cell_index(c)[0] % 2 == 0) ? 0.15 : 1.25;

  const ProjectionSystem system = build_projection_system(space, cells, 0.0);
  const Vector unbounded = project_void_fraction(system);
  double lo = 1e30, hi = -1e30;
  for (int i = 0; i < unbounded.size(); ++i)
    {
      lo = std::min(lo, unbounded[i]);
      hi = std::max(hi, unbounded[i]);
    }
  REQUIRE(lo < 0.36);
  REQUIRE(hi > 1.0);

  const ActiveSetResult bounded = bound_void_fraction(system, 0.36, 1.0);
  CHECK(bounded.kkt_residual <= 1e-10);
  CHECK(bounded.n_active_lower > 0);
  CHECK(bounded.n_active_upper > 0);
  for (int i = 0; i < bounded.values.size(); ++i)
    {
      CHECK(bounded.values[i] >= 0.36 - 1e-12);
      CHECK(bounded.values[i] <= 1.0 + 1e-12);
    }
}

TEST_CASE("bounding is a no-op when the projection already sits inside")
{
  const Mesh mesh = build_box_mesh(2, {4, 4, 1}, Vec3(0, 0, 0), Vec3(1, 1, 0));
  const FeSpace space(mesh, 1);
  const std::vector<double> cells(mesh.n_cells(), 0.7);
  const ProjectionSystem system = build_projection_system(space, cells, 0.0);

  const Vector unbounded = project_void_fraction(system);
  const ActiveSetResult bounded = bound_void_fraction(system, 0.36, 1.0);
  CHECK(bounded.n_active_lower == 0);
  CHECK(bounded.n_active_upper == 0);
  for (int i = 0; i < unbounded.size(); ++i)
    CHECK(bounded.values[i] == doctest::Approx(unbounded[i]).epsilon(1e-12));

  const FeSpace q2(mesh, 2);
  const ProjectionSystem sys2 = build_projection_system(q2, cells, 0.0);
  CHECK_THROWS_AS(bound_void_fraction(sys2, 0.36, 1.0), ConfigError);
}

TEST_CASE("pipeline reports masses and the bounding defect")
{
  const Mesh mesh = build_box_mesh(3, {4, 4, 4}, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const FeSpace space(mesh, 1);

  ParticleSet particles;
  // A cluster dense enough to drive the projection below the lower bound.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      particles.add(Vec3(0.3 + 0.12 * i, 0.3 + 0.12 * j, 0.4), 0.07);

  VoidFractionOptions options;
  options.smoothing_length_sq = 0.01;
  options.bound = false;
  const VoidFractionResult plain = compute_void_fraction(space, particles, options);
  CHECK(plain.bounding_mass_defect <= 1e-12);
  CHECK(plain.projected_mass == doctest::Approx(plain.bounded_mass));

  options.bound = true;
  const VoidFractionResult clipped = compute_void_fraction(space, particles, options);
  CHECK(clipped.min_value >= 0.36 - 1e-12);
  CHECK(clipped.max_value <= 1.0 + 1e-12);
  CHECK(clipped.kkt_residual <= 1e-10);
  if (clipped.n_active_lower + clipped.n_active_upper > 0)
    CHECK(clipped.bounding_mass_defect > 0.0);
}

TEST_CASE("step profile splits the domain at |x| = 0.5")
{
  CHECK(step_void_fraction(Vec3(-0.75, 0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(step_void_fraction(Vec3(0.75, 0.3, 0.0)) == doctest::Approx(1.0));
  CHECK(step_void_fraction(Vec3(0.0, 0.0, 0.0)) == doctest::Approx(0.5));
  CHECK(step_void_fraction(Vec3(-0.5, 0.0, 0.0)) == doctest::Approx(0.5));
  CHECK(step_void_fraction(Vec3(0.5, 0.0, 0.0)) == doctest::Approx(0.5));
}

TEST_CASE("constant void fraction data carries histories")
{
  const Mesh mesh = build_box_mesh(2, {2, 2, 1}, Vec3(0, 0, 0), Vec3(1, 1, 0));
  const FeSpace space(mesh, 1);
  VoidFractionData data = VoidFractionData::constant(space, 0.8);
  CHECK_FALSE(data.analytic());
  CHECK(data.values.size() == space.n_dofs());
  CHECK(data.values[4] == doctest::Approx(0.8));

  data.values.setConstant(0.9);
  data.push_history();
  CHECK(data.prev1[0] == doctest::Approx(0.9));
  CHECK(data.prev2[0] == doctest::Approx(0.8));
}
