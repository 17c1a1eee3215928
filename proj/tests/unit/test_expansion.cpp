#include <gtest/gtest.h>

#include "orbitlab/errors.hpp"
#include "orbitlab/expansion.hpp"
#include "orbitlab/slope.hpp"
#include "orbitlab/spectral.hpp"
#include "support.hpp"

using namespace orbitlab;
using namespace orbitlab::expansion;
using geometry::Scenario;
using geometry::ScenarioSpec;
using test::pi;

namespace sp = orbitlab::spectral;

namespace {

Scenario modulated() {
  ScenarioSpec m;
  m.b0 = -1.0;
  m.b_mod = 0.3;
  m.c3 = 0.7;
  return Scenario(m);
}

double residual_slope(const Scenario& s, const ExpansionBundle& b, int order) {
  std::vector<double> e, r;
  for (double eps = 1e-4; eps <= 1.001e-3; eps *= std::pow(10.0, 0.125)) {
    e.push_back(eps);
    r.push_back(residual(s, assemble(s, b, eps, order), eps).dual);
  }
  return harness::fit_slope(e, r).slope;
}

}  // namespace

TEST(Bundle, UnitCircle) {
  const auto s = Scenario::circle(-1.0);
  const auto b = build_bundle(s, loops::circle_cover(128, 1));
  EXPECT_LE((b.a.array() + 4 * pi * pi).abs().maxCoeff(), 1e-9);
  EXPECT_LE(b.fT.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((b.gn.array() - 16 * std::pow(pi, 4)).abs().maxCoeff(), 1e-6);
  EXPECT_EQ(b.kernel_dim, 1);
  EXPECT_LE(b.orthogonality, 1e-8);
  EXPECT_LE(b.compatibility, 1e-8);
}

TEST(Bundle, SphereGreatCircleA) {
  const auto s = Scenario::sphere(-2.0);
  const auto x0 = loops::great_circle(64, test::v3(1, 0, 0), test::v3(0, 1, 0));
  EXPECT_LE((compute_a(s, x0).array() + 2 * pi * pi).abs().maxCoeff(), 1e-9);
  EXPECT_THROW(build_bundle(s, x0), DegenerateGeodesic);
}

TEST(Bundle, TorusMeridianNeedsSymmetricKernel) {
  const auto s = Scenario::torus(-1.0);
  const auto x0 = loops::torus_loop(128, 0, 1, 2, 1);
  EXPECT_LE((compute_a(s, x0).array() + 4 * pi * pi).abs().maxCoeff(), 1e-9);
  EXPECT_THROW(build_bundle(s, x0), DegenerateGeodesic);
  FTOptions o;
  o.allow_symmetric_kernel = true;
  const auto b = build_bundle(s, x0, o);
  EXPECT_EQ(b.kernel_dim, 2);
  EXPECT_LE(b.fT.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bundle, ModulatedCircleConstraints) {
  const auto s = modulated();
  const auto b = build_bundle(s, loops::circle_cover(128, 1));
  EXPECT_GT(b.fT.cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LE(b.orthogonality, 1e-8);
  EXPECT_LE(b.compatibility, 1e-8);
  EXPECT_LE(b.fT_equation, 1e-8);
  EXPECT_LE(b.a_consistency, 1e-8);
}

TEST(Bundle, NonGeodesicRejected) {
  EXPECT_THROW(build_bundle(Scenario::sphere(-2.0), loops::latitude_circle(64, 0.5)), NotAGeodesic);
}

TEST(Assemble, CircleMatchesExactSeries) {
  const auto s = Scenario::circle(-1.0);
  const auto b = build_bundle(s, loops::circle_cover(128, 1));
  EXPECT_EQ(assemble(s, b, 0.0).X, b.x0.X);
  const double eps = 1e-3;
  const auto x = assemble(s, b, eps);
  const double r = x.X.row(5).norm();
  EXPECT_NEAR(r, 1 - 4 * pi * pi * eps + 16 * std::pow(pi, 4) * eps * eps, 1e-10);
  // agrees with (1 + 4 pi^2 eps)^-1 up to the eps^3 term
  EXPECT_NEAR(r, 1 / (1 + 4 * pi * pi * eps), 1.1 * std::pow(4 * pi * pi * eps, 3));
}

TEST(Assemble, TubeExitForLargeEps) {
  const auto s = Scenario::circle(-1.0);
  const auto b = build_bundle(s, loops::circle_cover(64, 1));
  EXPECT_THROW(assemble(s, b, 0.1), TubeExit);
}

TEST(Residual, OrderSlopes) {
  for (const auto& s : {Scenario::circle(-1.0), modulated()}) {
    const auto b = build_bundle(s, loops::circle_cover(128, 1));
    EXPECT_NEAR(residual_slope(s, b, 0), 0.0, 0.1);
    EXPECT_NEAR(residual_slope(s, b, 1), 1.0, 0.1);
    EXPECT_NEAR(residual_slope(s, b, 2), 2.0, 0.1);
  }
}

TEST(Residual, ExactRadialOrbitAtFloor) {
  const auto s = Scenario::circle(-1.0);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double R = 1 / (1 + 4 * pi * pi * eps);
    const auto x = loops::circle_cover(128, 1, R);
    EXPECT_LE(residual(s, x, eps).sup, 1e-9 / eps);
  }
}

TEST(AlphaBeta, CircleValues) {
  const auto s = Scenario::circle(-1.0);
  const auto b = build_bundle(s, loops::circle_cover(64, 1));
  const auto ab = alpha_beta(s, b);
  for (int j = 0; j < 64; ++j) {
    const Vec expect = -1.0 * (-4 * pi * pi) * b.normals.row(j).transpose();
    EXPECT_LE((ab.alpha.row(j).transpose() - expect).norm(), 1e-8);
    // tangential part of beta vanishes
    EXPECT_NEAR(ab.beta.row(j).dot(b.xdot.row(j)), 0.0, 1e-6);
  }
  // zero bundle gives zero coefficients
  ExpansionBundle z = b;
  z.a.setZero();
  z.fT.setZero();
  z.gn.setZero();
  const auto ab0 = alpha_beta(s, z);
  EXPECT_EQ(ab0.alpha.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(ab0.beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AlphaBeta, ClosedFormMatchesFit) {
  const auto s = modulated();
  const auto b = build_bundle(s, loops::circle_cover(64, 1));
  const auto rep = verify_alphabeta(s, b, {1e-4, 2e-4, 4e-4, 8e-4, 1.6e-3});
  // least-squares fit of a cubic in eps; limited by round-off in V'/eps
  EXPECT_LE(rep.alpha_rel_err, 1e-5);
  EXPECT_LE(rep.beta_rel_err, 1e-3);
}

TEST(Equivariance, TimeShiftCommutes) {
  const auto s = modulated();
  const auto x0 = loops::circle_cover(128, 1);
  const auto b = build_bundle(s, x0);
  const int m = 7;
  Loop sh;
  sh.X.resize(128, 2);
  for (int j = 0; j < 128; ++j) sh.X.row((j + m) % 128) = x0.X.row(j);
  sh.on_manifold = true;
  const auto c = build_bundle(s, sh);
  for (int j = 0; j < 128; ++j) {
    const int k = (j + m) % 128;
    EXPECT_NEAR(c.a[k], b.a[j], 1e-8);
    EXPECT_NEAR(c.gn[k], b.gn[j], 1e-6 * b.gn.cwiseAbs().maxCoeff());
    EXPECT_LE((c.fT.row(k) - b.fT.row(j)).norm(), 1e-8);
  }
}
