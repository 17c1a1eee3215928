#include <gtest/gtest.h>

#include "orbitlab/errors.hpp"
#include "orbitlab/geometry.hpp"
#include "orbitlab/scenario.hpp"
#include "support.hpp"

using namespace orbitlab;
using namespace orbitlab::geometry;

TEST(ProjectToTube, CircleRadial) {
  const auto s = Scenario::circle(-1.0);
  const auto tp = project_to_tube(s, test::v2(1.2, 0.0));
  EXPECT_NEAR(tp.h[0], 1.0, 1e-15);
  EXPECT_NEAR(tp.h[1], 0.0, 1e-15);
  EXPECT_NEAR(tp.v, 0.2, 1e-15);
}

TEST(ProjectToTube, IdentityOnManifold) {
  const auto s = Scenario::circle(-1.0);
  const auto tp = project_to_tube(s, test::v2(1.0, 0.0));
  EXPECT_NEAR(tp.v, 0.0, 1e-16);
  EXPECT_NEAR((tp.h - test::v2(1.0, 0.0)).norm(), 0.0, 1e-16);
}

TEST(ProjectToTube, TorusClosedForm) {
  const auto s = Scenario::torus(-1.0, 2.0, 1.0);
  const auto tp = project_to_tube(s, test::v3(3.3, 0.0, 0.0));
  EXPECT_NEAR(tp.v, 0.3, 1e-14);
  EXPECT_NEAR((tp.h - test::v3(3.0, 0.0, 0.0)).norm(), 0.0, 1e-14);
}

TEST(ProjectToTube, OutsideTubeThrows) {
  const auto s = Scenario::circle(-1.0);
  EXPECT_THROW(project_to_tube(s, test::v2(2.0, 0.0)), TubeExit);
  // 0.5 off the torus is past the 0.4 r tube
  const auto t = Scenario::torus(-1.0, 2.0, 1.0);
  EXPECT_THROW(project_to_tube(t, test::v3(3.5, 0.0, 0.0)), TubeExit);
}

TEST(Frame, UnitCircle) {
  const auto s = Scenario::circle(-1.0);
  const auto f = frame_at(s, test::v2(1.0, 0.0));
  EXPECT_NEAR((f.normal - test::v2(1.0, 0.0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f.tangent(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(f.H(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(f.b, -1.0, 1e-14);
  EXPECT_NEAR(f.Lambda_local, 0.0, 1e-13);
}

TEST(Frame, SphereHIsIdentity) {
  const auto s = Scenario::sphere(-2.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Vec x = test::random_vec(rng, 3).normalized();
    const auto f = frame_at(s, x);
    EXPECT_NEAR((f.H - Mat::Identity(2, 2)).norm(), 0.0, 1e-13);
    EXPECT_NEAR(f.b, -2.0, 1e-13);
  }
}

TEST(Frame, OrthonormalOnAllScenarios) {
  for (const auto& s : {Scenario::circle(-1.0), Scenario::sphere_quartic(), Scenario::torus(-1.0)}) {
    for (const Vec& x : s.manifold_samples(50)) {
      const auto f = frame_at(s, x);
      const int m = s.dim() - 1;
      EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
      EXPECT_LE((f.tangent.transpose() * f.normal).norm(), 1e-12);
      EXPECT_LE((f.tangent.transpose() * f.tangent - Mat::Identity(m, m)).norm(), 1e-12);
      EXPECT_LE((f.H - f.H.transpose()).norm(), 1e-14);
    }
  }
}

TEST(Frame, OriginHasNoNormal) {
  const auto s = Scenario::circle(-1.0);
  EXPECT_THROW(frame_at(s, test::v2(0.0, 0.0)), DegenerateNormal);
}

TEST(Geometry, CriticalManifold) {
  ScenarioSpec mod;
  mod.b0 = -1.0;
  mod.b_mod = 0.3;
  mod.c3 = 0.7;
  for (const auto& s : {Scenario::circle(-1.0), Scenario::sphere_quartic(), Scenario::torus(-1.0),
                        Scenario(mod)}) {
    for (const Vec& x : s.manifold_samples(64)) EXPECT_LE(s.gradient(x).norm(), 1e-10);
  }
}

TEST(Geometry, GaussMapFiniteDifference) {
  std::mt19937_64 rng(11);
  const auto s = Scenario::torus(-1.0);
  const auto pts = s.manifold_samples(100);
  for (const Vec& x : pts) {
    const auto f = frame_at(s, x);
    const Vec v = f.tangent * test::random_vec(rng, 2);
    const double h = 1e-4;
    const Vec np = frame_at(s, project_to_tube(s, x + h * v).h).normal;
    const Vec nm = frame_at(s, project_to_tube(s, x - h * v).h).normal;
    const Vec fd = (np - nm) / (2 * h);
    const Vec Hv = f.H_ambient * v;
    EXPECT_LE((fd - Hv).norm(), 1e-5 * std::max(1.0, Hv.norm()));
  }
}

TEST(Adapted, CircleValues) {
  const auto s = Scenario::circle(-1.0);
  const auto ad = adapted_derivatives(s, test::v2(0.0, 1.0));
  EXPECT_NEAR(ad.b, -1.0, 1e-13);
  EXPECT_NEAR(ad.D3ijn(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(ad.Dnb, 0.0, 1e-12);
  EXPECT_NEAR(ad.Db[0], 0.0, 1e-12);
  EXPECT_LE(ad.max_violation, 1e-8);
}

TEST(Adapted, VanishingPatternHolds) {
  for (const auto& s : {Scenario::sphere(-2.0), Scenario::torus(-1.0), Scenario::sphere_quartic()}) {
    for (const Vec& x : s.manifold_samples(40)) {
      const auto ad = adapted_derivatives(s, x);
      EXPECT_LE(ad.max_violation, 1e-8);
    }
  }
}

TEST(Adapted, ModulatedBHasTangentialGradient) {
  ScenarioSpec mod;
  mod.b0 = -1.0;
  mod.b_mod = 0.3;
  const Scenario s(mod);
  const auto ad = adapted_derivatives(s, test::v2(0.0, 1.0));
  // b = -(1 + 0.3 x1); at (0,1) the tangent is +-x1
  EXPECT_NEAR(std::abs(ad.Db[0]), 0.3, 1e-12);
}

TEST(Bounds, CircleAndTorus) {
  const auto c = scenario_bounds(Scenario::circle(-1.0), 64, 1.0);
  EXPECT_NEAR(c.H_bar, 1.0, 1e-12);
  EXPECT_NEAR(c.Lambda, 0.0, 1e-12);
  const auto t = scenario_bounds(Scenario::torus(-1.0, 2.0, 1.0), 400, 1.0);
  EXPECT_NEAR(t.H_bar, 1.0, 1e-12);
}

TEST(Bounds, QuadraticAttractiveAlwaysAdmissible) {
  const auto b = scenario_bounds(Scenario::circle(1.0), 64, 1e6);
  EXPECT_TRUE(b.attractive_admissible());
}

TEST(Scenario, RejectsBadParameters) {
  EXPECT_THROW(Scenario::circle(0.0), std::invalid_argument);
  EXPECT_THROW(Scenario::torus(-1.0, 1.0, 2.0), std::invalid_argument);
}
