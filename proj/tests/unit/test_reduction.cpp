#include <gtest/gtest.h>

#include "orbitlab/errors.hpp"
#include "orbitlab/geometry.hpp"
#include "orbitlab/reduction.hpp"
#include "orbitlab/slope.hpp"
#include "orbitlab/spectral.hpp"
#include "support.hpp"

using namespace orbitlab;
using namespace orbitlab::reduction;
using geometry::Scenario;
using geometry::ScenarioSpec;
using test::pi;

namespace sp = orbitlab::spectral;

namespace {

Scenario cubic_circle() {
  ScenarioSpec c;
  c.b0 = -1.0;
  c.c3 = 0.5;
  return Scenario(c);
}

Mat random_tangent(const Scenario& s, const Loop& h, std::mt19937_64& rng) {
  const int N = h.N(), n = h.dim();
  Mat Z = Mat::Zero(N, n);
  const Vec t = sp::grid(N);
  for (int k = 1; k <= 3; ++k) {
    const Vec a = test::random_vec(rng, n), b = test::random_vec(rng, n);
    for (int j = 0; j < N; ++j)
      Z.row(j) += (a * std::cos(2 * pi * k * t[j]) + b * std::sin(2 * pi * k * t[j])).transpose() / k;
  }
  return loops::tangential_part(loops::loop_geometry(s, h), Z);
}

}  // namespace

TEST(Normal, CircleGeodesic) {
  const auto s = Scenario::circle(-1.0);
  const double eps = 1e-3;
  const auto st = solve_normal(s, loops::circle_cover(128, 1), eps, Mode::repulsive);
  const double exact = 1 / (1 + 4 * pi * pi * eps) - 1;
  EXPECT_LE((st.v.array() - exact).abs().maxCoeff(), 1e-12);
  // leading order eps a
  EXPECT_LE((st.v.array() + 4 * pi * pi * eps).abs().maxCoeff(), 2 * std::pow(4 * pi * pi * eps, 2));
  EXPECT_LE(st.residual, 1e-9);
  EXPECT_LE(st.fp_direct_gap, 1e-9);
}

TEST(Normal, ConstantLoopHasZeroV) {
  Loop h;
  h.X = Mat::Zero(32, 2);
  h.X.col(0).setOnes();
  const auto st = solve_normal(cubic_circle(), h, 1e-3, Mode::repulsive);
  EXPECT_EQ(st.v.cwiseAbs().maxCoeff(), 0.0);
  const auto en = reduced_energy(cubic_circle(), st);
  EXPECT_EQ(en.G_direct, 0.0);
  EXPECT_EQ(en.G_integrand, 0.0);
}

TEST(Normal, AmbientConsistency) {
  const auto s = Scenario::torus(-1.0);
  const auto h = loops::perturbed_loop(s, loops::torus_loop(64, 1, 1, 2, 1), 4, 0.2);
  const auto st = solve_normal(s, h, 1e-3, Mode::repulsive);
  const Mat U = st.u();
  for (int j = 0; j < 64; ++j) {
    const auto tp = geometry::project_to_tube(s, U.row(j).transpose());
    EXPECT_LE((tp.h - h.X.row(j).transpose()).norm(), 1e-9);
    EXPECT_NEAR(tp.v, st.v[j], 1e-9);
  }
}

TEST(Normal, LinearInEpsForNonGeodesic) {
  const auto s = Scenario::sphere_quartic();
  const auto h = loops::project(s, loops::latitude_circle(64, 0.4).X);
  std::vector<double> e, v;
  for (double eps : {1e-4, 3e-4, 1e-3, 3e-3}) {
    e.push_back(eps);
    v.push_back(solve_normal(s, h, eps, Mode::repulsive).v_sup);
  }
  EXPECT_NEAR(harness::fit_slope(e, v).slope, 1.0, 0.1);
}

TEST(Normal, FixedPointAgreesOnRandomLoops) {
  const auto s = Scenario::sphere_quartic();
  const auto base = loops::great_circle(64, test::v3(1, 0, 0), test::v3(0, 1, 0));
  for (int i = 0; i < 50; ++i) {
    const auto h = loops::perturbed_loop(s, base, 300 + i, 0.3);
    const auto st = solve_normal(s, h, 1e-3, Mode::repulsive);
    EXPECT_LE(st.fp_direct_gap, 1e-9);
  }
}

TEST(Normal, SignAndResonanceChecks) {
  const auto c = loops::circle_cover(64, 1);
  EXPECT_THROW(solve_normal(Scenario::circle(1.0), c, 1e-3, Mode::repulsive), std::invalid_argument);
  EXPECT_THROW(solve_normal(Scenario::circle(-1.0), c, 1e-3, Mode::attractive), std::invalid_argument);
  EXPECT_THROW(solve_normal(Scenario::circle(1.0), c, 1.0 / (4 * pi * pi * 400), Mode::attractive),
               ResonantLambda);
}

TEST(Energy, QuadraticIntegrandVanishes) {
  const auto s = Scenario::sphere(-2.0);
  const auto h = loops::perturbed_loop(
      s, loops::great_circle(64, test::v3(1, 0, 0), test::v3(0, 0, 1)), 5, 0.3);
  const auto en = reduced_energy(s, solve_normal(s, h, 1e-3, Mode::repulsive));
  EXPECT_LE(std::abs(en.G_integrand), 1e-12);
  EXPECT_LE(std::abs(en.G_closed - en.G_direct), 1e-9);
  EXPECT_NEAR(en.G_direct, en.L_eps - en.L0, 1e-12);
}

TEST(Energy, CubicGapIsQuadraticInEps) {
  const auto s = cubic_circle();
  const auto h = loops::circle_cover(128, 1);
  std::vector<double> e, g;
  for (double eps : {1e-4, 2e-4, 5e-4, 1e-3}) {
    const auto en = reduced_energy(s, solve_normal(s, h, eps, Mode::repulsive));
    EXPECT_LE(std::abs(en.G_closed - en.G_direct), 1e-6 * std::abs(en.G_direct));
    e.push_back(eps);
    g.push_back(std::abs(en.G_integrand));
  }
  EXPECT_NEAR(harness::fit_slope(e, g).slope, 2.0, 0.1);
}

TEST(Gradient, RotationPairingZero) {
  const auto s = Scenario::circle(-1.0);
  const auto h = loops::circle_cover(128, 1);
  const auto st = solve_normal(s, h, 1e-3, Mode::repulsive);
  EXPECT_NEAR(sp::mean_dot(reduced_gradient(s, st).V, sp::derivative(h.X)), 0.0, 1e-9);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(19);
  const auto s = Scenario::sphere_quartic();
  const double eps = 1e-3;
  const auto base = loops::great_circle(64, test::v3(1, 0, 0), test::v3(0, 1, 0));
  for (int i = 0; i < 20; ++i) {
    const auto h = loops::perturbed_loop(s, base, 500 + i, 0.3);
    const Mat K = random_tangent(s, h, rng);
    const auto L = [&](double d) {
      return reduced_energy(s, solve_normal(s, loops::project(s, h.X + d * K), eps,
                                            Mode::repulsive))
          .L_eps;
    };
    const double d = 1e-5;
    const double fd = (L(d) - L(-d)) / (2 * d);
    const double an = sp::mean_dot(reduced_gradient(s, solve_normal(s, h, eps, Mode::repulsive)).V, K);
    EXPECT_LE(std::abs(fd - an), 1e-4 * std::max(1.0, std::abs(an)));
  }
}

TEST(Gradient, CloseToEnergyGradient) {
  const auto s = Scenario::circle(-1.0);
  const auto h = loops::perturbed_loop(s, loops::circle_cover(64, 1), 3, 0.3);
  for (double eps : {1e-3, 1e-4}) {
    const auto g = reduced_gradient(s, solve_normal(s, h, eps, Mode::repulsive)).V;
    const auto g0 = loops::energy_gradient(s, h).V;
    EXPECT_LE(sp::l2_norm(g - g0), 100 * std::sqrt(eps) * sp::l2_norm(g0));
  }
}

TEST(Minimize, CircleClassOne) {
  const auto s = Scenario::circle(-1.0);
  const auto seed = loops::perturbed_loop(s, loops::circle_cover(64, 1), 8, 0.3);
  double prev = 1e300;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto m = minimize_reduced(s, seed, {1}, eps, Mode::repulsive);
    const double err = std::abs(m.value - 2 * pi * pi);
    EXPECT_LT(err, prev);
    prev = err;
    for (std::size_t i = 1; i < m.history.size(); ++i)
      EXPECT_LE(m.history[i], m.history[i - 1] * (1 + 64 * 2.3e-16));
  }
  // the gap is O(eps) with constant about 8 pi^4 / (2 pi^2) for b0 = -1
  EXPECT_LE(prev / (2 * pi * pi), 5e-3);
}

TEST(Minimize, TorusMeridian) {
  const auto s = Scenario::torus(-10.0);
  const auto seed = loops::perturbed_loop(s, loops::torus_loop(64, 0, 1, 2, 1, 0.3), 6, 0.2, 2);
  const auto m = minimize_reduced(s, seed, {0, 1}, 1e-4, Mode::repulsive);
  EXPECT_LE(std::abs(m.value - 2 * pi * pi) / (2 * pi * pi), 1e-3);
  EXPECT_EQ(loops::winding(s, m.h), (std::vector<int>{0, 1}));
}

TEST(Minimize, WrongClassSeedRejected) {
  const auto s = Scenario::circle(-1.0);
  EXPECT_THROW(minimize_reduced(s, loops::circle_cover(64, 2), {1}, 1e-3, Mode::repulsive),
               std::invalid_argument);
}
