#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vans/mms.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace vans;

namespace
{
  // Independent check of the manufactured sources: apply the strong operators
  // to the closed-form fields with finite differences and compare against the
  // shipped source terms. Nothing here reuses the generated expressions.
  struct StrongOperator
  {
    const MmsCase &c;
    double t;

    static constexpr double h1 = 1e-6; // first derivatives
    static constexpr double h2 = 1e-4; // second derivatives

    Vec3 du_dt(const Vec3 &p) const
    {
      return (c.velocity(p, t + h1) - c.velocity(p, t - h1)) / (2.0 * h1);
    }

    Vec3 du_daxis(const Vec3 &p, int axis) const
    {
      Vec3 e = Vec3::Zero();
      e[axis] = h1;
      return (c.velocity(p + e, t) - c.velocity(p - e, t)) / (2.0 * h1);
    }

    Vec3 laplace_u(const Vec3 &p) const
    {
      Vec3 lap = Vec3::Zero();
      for (int axis = 0; axis < 2; ++axis)
        {
          Vec3 e = Vec3::Zero();
          e[axis] = h2;
          lap += (c.velocity(p + e, t) - 2.0 * c.velocity(p, t) + c.velocity(p - e, t)) / (h2 * h2);
        }
      return lap;
    }

    Vec3 grad_p(const Vec3 &p) const
    {
      Vec3 g = Vec3::Zero();
      for (int axis = 0; axis < 2; ++axis)
        {
          Vec3 e = Vec3::Zero();
          e[axis] = h1;
          g[axis] = (c.pressure(p + e, t) - c.pressure(p - e, t)) / (2.0 * h1);
        }
      return g;
    }

    double continuity_residual(const Vec3 &p) const
    {
      double rc = (c.void_fraction(p, t + h1) - c.void_fraction(p, t - h1)) / (2.0 * h1);
      for (int axis = 0; axis < 2; ++axis)
        {
          Vec3 e = Vec3::Zero();
          e[axis] = h1;
          rc += (c.void_fraction(p + e, t) * c.velocity(p + e, t)[axis] -
                 c.void_fraction(p - e, t) * c.velocity(p - e, t)[axis]) /
                (2.0 * h1);
        }
      return rc;
    }

    Vec3 momentum_source(const Vec3 &p, VansForm form) const
    {
      const double eps = c.void_fraction(p, t);
      const Vec3 u = c.velocity(p, t);
      const double sm = c.mass_source ? c.mass_source(p, t) : 0.0;
      const Vec3 conv = u[0] * du_daxis(p, 0) + u[1] * du_daxis(p, 1);

      Vec3 g = eps * du_dt(p) + eps * conv + sm * u;
      if (form == VansForm::a)
        g += eps * grad_p(p) - eps * c.viscosity * laplace_u(p);
      else
        g += grad_p(p) - c.viscosity * laplace_u(p);
      return g;
    }
  };

  const std::vector<Vec3> probes = {Vec3(0.3, -0.2, 0.0), Vec3(-0.7, 0.55, 0.0),
                                    Vec3(0.12, 0.81, 0.0), Vec3(-0.33, -0.41, 0.0)};
} // namespace

TEST_CASE("shipped momentum sources match the finite-difference operator")
{
  for (int id = 0; id <= 3; ++id)
    {
      const MmsCase c = mms_case(id, 0.7);
      const StrongOperator op{c, 0.3};
      for (const Vec3 &p : probes)
        {
          const Vec3 ga = c.momentum_source_a(p, 0.3);
          const Vec3 gb = c.momentum_source_b(p, 0.3);
          const Vec3 fa = op.momentum_source(p, VansForm::a);
          const Vec3 fb = op.momentum_source(p, VansForm::b);
          for (int comp = 0; comp < 2; ++comp)
            {
              CHECK(std::abs(ga[comp] - fa[comp]) <= 1e-5 * (std::abs(ga[comp]) + 1.0));
              CHECK(std::abs(gb[comp] - fb[comp]) <= 1e-5 * (std::abs(gb[comp]) + 1.0));
            }
        }
    }
}

TEST_CASE("mass sources close the continuity equation")
{
  for (int id = 0; id <= 3; ++id)
    {
      const MmsCase c = mms_case(id);
      const StrongOperator op{c, 0.3};
      for (const Vec3 &p : probes)
        {
          const double sm = c.mass_source ? c.mass_source(p, 0.3) : 0.0;
          CHECK(std::abs(op.continuity_residual(p) - sm) <= 1e-7);
        }
    }
}

TEST_CASE("sources agree with symbolic samples at a pinned point")
{
  // Values derived with an independent computer algebra pass at
  // (x, y) = (1/4, -1/3), t = 1/8, nu = 7/10.
  const Vec3 p(0.25, -1.0 / 3.0, 0.0);
  const double t = 0.125;

  const MmsCase c0 = mms_case(0, 0.7);
  CHECK(c0.momentum_source_a(p, t)[0] == doctest::Approx(6.19931456812703).epsilon(1e-12));
  CHECK(c0.momentum_source_a(p, t)[1] == doctest::Approx(13.3525443864132).epsilon(1e-12));
  CHECK(c0.momentum_source_b(p, t)[0] == doctest::Approx(11.2205318911579).epsilon(1e-12));
  CHECK(c0.momentum_source_b(p, t)[1] == doctest::Approx(27.725350915208).epsilon(1e-12));

  const MmsCase c1 = mms_case(1, 0.7);
  CHECK(c1.momentum_source_a(p, t)[0] == doctest::Approx(4.30116988726285).epsilon(1e-12));
  CHECK(c1.momentum_source_a(p, t)[1] == doctest::Approx(9.26417932209114).epsilon(1e-12));
  CHECK(c1.momentum_source_b(p, t)[0] == doctest::Approx(10.8598147514249).epsilon(1e-12));
  CHECK(c1.momentum_source_b(p, t)[1] == doctest::Approx(28.0377411217973).epsilon(1e-12));

  const MmsCase c2 = mms_case(2, 0.7);
  CHECK(c2.momentum_source_a(p, t)[0] == doctest::Approx(-2.28738625412835).epsilon(1e-12));
  CHECK(c2.momentum_source_a(p, t)[1] == doctest::Approx(-1.25766626621436).epsilon(1e-12));
  CHECK(c2.momentum_source_b(p, t)[0] == doctest::Approx(-3.3600299776104).epsilon(1e-12));
  CHECK(c2.momentum_source_b(p, t)[1] == doctest::Approx(-1.8427572377192).epsilon(1e-12));

  const MmsCase c3 = mms_case(3, 0.7);
  CHECK(c3.mass_source(p, t) == doctest::Approx(0.47568947559632).epsilon(1e-12));
  CHECK(c3.void_fraction_dt(p, t) == doctest::Approx(0.301522939488901).epsilon(1e-12));
  CHECK(c3.momentum_source_a(p, t)[0] == doctest::Approx(0.767437508181882).epsilon(1e-12));
  CHECK(c3.momentum_source_a(p, t)[1] == doctest::Approx(0.767437508181882).epsilon(1e-12));
  CHECK(c3.momentum_source_b(p, t)[0] == doctest::Approx(3.11678134951132).epsilon(1e-12));
  CHECK(c3.momentum_source_b(p, t)[1] == doctest::Approx(3.11678134951132).epsilon(1e-12));
}

TEST_CASE("manufactured fields respect their construction")
{
  // The vortex velocity vanishes on the boundary of [-1,1]^2.
  const MmsCase c1 = mms_case(1);
  for (double s : {-1.0, -0.25, 0.5, 1.0})
    {
      CHECK(c1.velocity(Vec3(1.0, s, 0.0), 0.0).norm() <= 1e-14);
      CHECK(c1.velocity(Vec3(-1.0, s, 0.0), 0.0).norm() <= 1e-14);
      CHECK(c1.velocity(Vec3(s, 1.0, 0.0), 0.0).norm() <= 1e-14);
      CHECK(c1.velocity(Vec3(s, -1.0, 0.0), 0.0).norm() <= 1e-14);
    }

  // Void fractions stay in physical range on a sample grid.
  for (int id = 0; id <= 3; ++id)
    {
      const MmsCase c = mms_case(id);
      for (double x = -1.0; x <= 1.0; x += 0.25)
        for (double y = -1.0; y <= 1.0; y += 0.25)
          {
            const double eps = c.void_fraction(Vec3(x, y, 0.0), 0.37);
            CHECK(eps > 0.0);
            CHECK(eps <= 1.0 + 1e-12);
          }
    }

  // Case values at reference points.
  CHECK(mms_case(1).void_fraction(Vec3(0.5, 0.5, 0.0), 0.0) == doctest::Approx(0.75));
  CHECK(mms_case(3).void_fraction(Vec3(0.0, 0.0, 0.0), 0.0) ==
        doctest::Approx(0.9 / M_E).epsilon(1e-14));

  // The closed-form eps time derivative matches finite differences.
  const MmsCase c3 = mms_case(3);
  const Vec3 p(0.3, -0.2, 0.0);
  const double fd =
    (c3.void_fraction(p, 0.3 + 1e-6) - c3.void_fraction(p, 0.3 - 1e-6)) / 2e-6;
  CHECK(c3.void_fraction_dt(p, 0.3) == doctest::Approx(fd).epsilon(1e-8));

  CHECK_THROWS_AS(mms_case(4), ConfigError);
}

TEST_CASE("void fraction data and sources wire into a config")
{
  const MmsCase c3 = mms_case(3, 0.25);
  const VoidFractionData data = mms_void_fraction_data(c3);
  CHECK(data.analytic());
  CHECK(data.dt_mode == EpsDtMode::analytic);
  CHECK(data.dt_analytic(Vec3(0.1, 0.1, 0.0), 0.2) ==
        doctest::Approx(c3.void_fraction_dt(Vec3(0.1, 0.1, 0.0), 0.2)));

  VansConfig config;
  config.form = VansForm::a;
  apply_mms_sources(config, c3);
  CHECK(config.viscosity == doctest::Approx(0.25));
  const Vec3 p(0.2, -0.4, 0.0);
  CHECK(config.momentum_source(p, 0.3)[0] ==
        doctest::Approx(c3.momentum_source_a(p, 0.3)[0]));
  CHECK(config.mass_source(p, 0.3) == doctest::Approx(c3.mass_source(p, 0.3)));

  const MmsCase c1 = mms_case(1);
  const VoidFractionData d1 = mms_void_fraction_data(c1);
  CHECK(d1.dt_mode == EpsDtMode::zero);
}

TEST_CASE("pressure pin takes the exact gauge value")
{
  const Mesh mesh = build_box_mesh(2, {4, 4, 1}, Vec3(-1, -1, 0), Vec3(1, 1, 0));
  const FeSpace pres(mesh, 1);
  const auto pin2 = mms_pressure_pin(mms_case(2), pres);
  CHECK(pin2.first == 0);
  CHECK(pin2.second == doctest::Approx(0.5).epsilon(1e-13)); // 0.5 + 0.5 sin(-pi) sin(-pi)
  const auto pin3 = mms_pressure_pin(mms_case(3), pres, 0.7);
  CHECK(pin3.second == doctest::Approx(0.0));
}

TEST_CASE("order fitting recovers exact slopes")
{
  const std::vector<double> h = {0.1, 0.05, 0.025};
  std::vector<double> err;
  for (double hi : h)
    err.push_back(3.0 * hi * hi);
  CHECK(fit_order(h, err) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> err1;
  for (double hi : h)
    err1.push_back(0.7 * hi);
  CHECK(fit_order(h, err1) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_order({0.1}, {1.0}), ConfigError);
}

TEST_CASE("a coarse stationary study already shows second-order velocity")
{
  const MmsCase c = mms_case(1);
  const ConvergenceStudy study = mms_spatial_study(c, VansForm::b, 1, {8, 16});
  REQUIRE(study.rows.size() == 2);
  CHECK(study.rows[0].errors.velocity > study.rows[1].errors.velocity);
  CHECK(study.order_velocity == doctest::Approx(2.0).epsilon(0.25));
  CHECK(study.rows[1].mass_global <= 1e-9);

  write_spatial_csv("mms_study_test.csv", study);
  std::ifstream in("mms_study_test.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "h,dofs,err_u_l2,err_p_l2");
  std::string last;
  while (std::getline(in, line))
    if (!line.empty())
      last = line;
  CHECK(last.rfind("# order,", 0) == 0);
  std::remove("mms_study_test.csv");
}

TEST_CASE("a short transient run stays bounded and reports per-step mass")
{
  const MmsCase c = mms_case(3);
  const MmsSolveResult run = solve_mms_transient(c, VansForm::b, 12, 1, 1, 0.05, 0.2);
  CHECK(run.errors.velocity < 1.0);
  CHECK(run.errors.velocity > 0.0);
  CHECK(run.mass_global > 0.0);
  CHECK(run.mass_global < 1e-3);
  CHECK(run.newton_iterations >= 4);

  CHECK_THROWS_AS(solve_mms_transient(c, VansForm::b, 8, 1, 1, 0.03, 0.2), ConfigError);
}
