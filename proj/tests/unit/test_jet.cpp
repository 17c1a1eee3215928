#include <gtest/gtest.h>

#include <cmath>

#include "orbitlab/jet.hpp"
#include "support.hpp"

using namespace orbitlab;

namespace {

// f(x, y, z) = x y / sqrt(1 + x^2 + z^2) + z^3
Jet3 f_jet(const double* p) {
  const Jet3 x = Jet3::variable(3, 0, p[0]);
  const Jet3 y = Jet3::variable(3, 1, p[1]);
  const Jet3 z = Jet3::variable(3, 2, p[2]);
  return x * y * reciprocal(sqrt(1.0 + square(x) + square(z))) + z * z * z;
}

double f(const double* p) {
  return p[0] * p[1] / std::sqrt(1 + p[0] * p[0] + p[2] * p[2]) + p[2] * p[2] * p[2];
}

}  // namespace

TEST(Jet, ConstantHasNoDerivatives) {
  const Jet3 c = Jet3::constant(2, 4.0);
  EXPECT_EQ(c.v, 4.0);
  for (double g : c.g) EXPECT_EQ(g, 0.0);
  for (double h : c.h) EXPECT_EQ(h, 0.0);
}

TEST(Jet, PolynomialDerivativesExact) {
  const Jet3 x = Jet3::variable(1, 0, 2.0);
  const Jet3 p = x * x * x;  // 8, 12, 12, 6
  EXPECT_DOUBLE_EQ(p.v, 8.0);
  EXPECT_DOUBLE_EQ(p.g[0], 12.0);
  EXPECT_DOUBLE_EQ(p.hess(0, 0), 12.0);
  EXPECT_DOUBLE_EQ(p.third(0, 0, 0), 6.0);
}

TEST(Jet, QuotientMatchesProductWithReciprocal) {
  const Jet3 x = Jet3::variable(2, 0, 0.7);
  const Jet3 y = Jet3::variable(2, 1, -1.3);
  const Jet3 a = (x + 2.0) / (y * y + 1.0);
  const Jet3 b = (x + 2.0) * reciprocal(y * y + 1.0);
  EXPECT_NEAR(a.v, b.v, 1e-15);
  for (int i = 0; i < 27; ++i) EXPECT_NEAR(a.t[i], b.t[i], 1e-13);
}

TEST(Jet, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = test::random_vec(rng, 3);
    const Jet3 j = f_jet(p.data());
    const double h = 1e-4;
    for (int i = 0; i < 3; ++i) {
      double a[3] = {p[0], p[1], p[2]}, b[3] = {p[0], p[1], p[2]};
      a[i] += h;
      b[i] -= h;
      EXPECT_NEAR(j.g[i], (f(a) - f(b)) / (2 * h), 1e-7);
      const Jet3 ja = f_jet(a), jb = f_jet(b);
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(j.hess(i, k), (ja.g[k] - jb.g[k]) / (2 * h), 1e-6);
        for (int l = 0; l < 3; ++l)
          EXPECT_NEAR(j.third(i, k, l), (ja.hess(k, l) - jb.hess(k, l)) / (2 * h), 1e-5);
      }
    }
  }
}

TEST(Jet, TensorsAreSymmetric) {
  const double p[3] = {0.3, -0.8, 1.1};
  const Jet3 j = f_jet(p);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_DOUBLE_EQ(j.hess(a, b), j.hess(b, a));
      for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(j.third(a, b, c), j.third(b, a, c), 1e-14);
        EXPECT_NEAR(j.third(a, b, c), j.third(a, c, b), 1e-14);
      }
    }
}
