#include <gtest/gtest.h>

#include "orbitlab/errors.hpp"
#include "orbitlab/orbit.hpp"
#include "orbitlab/periodic_ode.hpp"
#include "orbitlab/slope.hpp"
#include "support.hpp"

using namespace orbitlab;
using namespace orbitlab::orbit;
using geometry::Scenario;
using geometry::ScenarioSpec;
using test::pi;

namespace {

Scenario modulated() {
  ScenarioSpec m;
  m.b0 = -1.0;
  m.b_mod = 0.3;
  m.c3 = 0.7;
  return Scenario(m);
}

double max_radius_error(const Loop& x, double R) {
  double w = 0.0;
  for (int j = 0; j < x.N(); ++j) w = std::max(w, std::abs(x.X.row(j).norm() - R));
  return w;
}

}  // namespace

TEST(Correct, CircleExactRadius) {
  const auto s = Scenario::circle(-1.0);
  const auto b = expansion::build_bundle(s, loops::circle_cover(128, 1));
  const double eps = 1e-3;
  const auto r = correct_from_bundle(s, b, eps);
  EXPECT_LE(max_radius_error(r.solution, 1 / (1 + 4 * pi * pi * eps)), 1e-10);
  EXPECT_LE(r.gauge_defect, 1e-10);
  EXPECT_LE(r.residual_sup, 1e-9 / eps);
  EXPECT_EQ(r.initial_guess, "order2");
}

TEST(Correct, NewtonConvergesQuadratically) {
  const auto s = modulated();
  const auto b = expansion::build_bundle(s, loops::circle_cover(128, 1));
  const auto r = correct_from_bundle(s, b, 5e-4);
  const auto& h = r.residual_history;
  ASSERT_GE(h.size(), 3u);
  for (std::size_t i = 1; i + 1 < h.size(); ++i)
    if (h[i] > 1e-6) EXPECT_LE(h[i + 1] / (h[i] * h[i]), 1.0);
}

TEST(Correct, FirstIntegralConserved) {
  const auto s = modulated();
  const auto b = expansion::build_bundle(s, loops::circle_cover(128, 1));
  for (double eps : {1e-4, 3e-4, 1e-3}) {
    const auto r = correct_from_bundle(s, b, eps);
    EXPECT_LE(first_integral_drift(s, r.solution, eps), 1e-8);
  }
}

TEST(Correct, GaugeUnique) {
  const auto s = modulated();
  const auto b = expansion::build_bundle(s, loops::circle_cover(128, 1));
  const double eps = 5e-4;
  const auto xe = expansion::assemble(s, b, eps);
  const auto r1 = correct_orbit(s, xe, eps);
  const auto r2 = correct_orbit(s, loops::time_shift(xe, 0.137), eps);
  EXPECT_LE(aligned_distance(r1.solution, r2.solution), 1e-9);
}

TEST(Correct, CorrectionRates) {
  const auto s = modulated();
  const auto b = expansion::build_bundle(s, loops::circle_cover(128, 1));
  std::vector<double> e, ys, yn;
  for (double eps = 1e-4; eps <= 1.001e-3; eps *= std::pow(10.0, 0.25)) {
    const auto r = correct_from_bundle(s, b, eps);
    e.push_back(eps);
    ys.push_back(r.y_sup);
    yn.push_back(r.yn_sup);
  }
  EXPECT_GE(harness::fit_slope(e, ys).slope, 1.8);
  EXPECT_GT(harness::fit_slope(e, yn).slope, 2.0);
}

TEST(Attractive, RadiusOnGrid) {
  const auto s = Scenario::circle(1.0);
  const auto b = expansion::build_bundle(s, loops::circle_cover(256, 1));
  const auto r = attractive_correct(s, b, 50, 2 * loops::energy(b.x0) + 1);
  EXPECT_NEAR(r.eps_k, 1.0 / std::pow(2 * pi * 50.5, 2), 1e-18);
  EXPECT_LE(max_radius_error(r.orbit.solution, 1 / (1 - 4 * pi * pi * r.eps_k)), 1e-10);
  EXPECT_NEAR(r.rho, r.C * std::sqrt(r.eps_k), 1e-15);
}

TEST(Attractive, ModulatedHessianRejected) {
  ScenarioSpec m;
  m.b0 = 1.0;
  m.b_mod = 0.2;
  const Scenario s(m);
  const auto b = expansion::build_bundle(s, loops::circle_cover(64, 1));
  EXPECT_THROW(attractive_correct(s, b, 20, 100.0), AdmissibilityFailed);
}

TEST(Sweep, AdiabaticRateOnCircle) {
  const auto s = Scenario::circle(-100.0);
  const auto b = expansion::build_bundle(s, loops::circle_cover(128, 1));
  std::vector<double> T;
  for (double t = 1e2; t <= 1.001e6; t *= 10) T.push_back(t);
  const auto rep = adiabatic_sweep(s, b, T);
  EXPECT_EQ(rep.skipped, 0);
  EXPECT_NEAR(rep.slope_C0, -0.5, 0.1);
  EXPECT_TRUE(rep.C1_decreasing);
  EXPECT_NEAR(rep.rows.back().energy, 2 * pi * pi, 2 * pi * pi * 1e-3);
}

TEST(Sweep, RowsOutsideTubeAreSkipped) {
  const auto s = Scenario::circle(-1.0);
  const auto b = expansion::build_bundle(s, loops::circle_cover(64, 1));
  const auto rep = adiabatic_sweep(s, b, {1e2, 1e4, 1e5, 1e6});
  EXPECT_EQ(rep.rows.size(), 4u);
  EXPECT_EQ(rep.skipped, 1);
  EXPECT_NE(rep.rows[0].status, "ok");
  EXPECT_TRUE(std::isnan(rep.rows[0].dist_C0));
  EXPECT_EQ(rep.rows[1].status, "ok");
}

TEST(Eps0, FoundForCircle) {
  const auto s = Scenario::circle(-1.0);
  const auto b = expansion::build_bundle(s, loops::circle_cover(64, 1));
  const double e0 = find_eps0(s, b);
  EXPECT_GT(e0, 0.0);
  EXPECT_LE(e0, 1e-2);
}

TEST(AlignedDistance, ShiftInvariant) {
  const auto c = loops::circle_cover(64, 1);
  EXPECT_LE(aligned_distance(c, loops::time_shift(c, 5.0 / 64)), 1e-12);
  EXPECT_GT(aligned_distance(c, loops::circle_cover(64, 1, 1.1)), 0.09);
}
