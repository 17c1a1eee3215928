#include <gtest/gtest.h>

#include "orbitlab/spectral.hpp"
#include "support.hpp"

using namespace orbitlab;
using namespace orbitlab::spectral;
using test::pi;

namespace {

Mat trig(int N, int k, double phase = 0.0) {
  const Vec t = grid(N);
  Mat X(N, 1);
  for (int j = 0; j < N; ++j) X(j, 0) = std::sin(2 * pi * k * t[j] + phase);
  return X;
}

}  // namespace

TEST(Spectral, DerivativeOfSineIsExact) {
  const int N = 64;
  const Vec t = grid(N);
  const Mat X = trig(N, 3);
  const Mat D = derivative(X);
  const Mat DD = second_derivative(X);
  for (int j = 0; j < N; ++j) {
    EXPECT_NEAR(D(j, 0), 6 * pi * std::cos(6 * pi * t[j]), 1e-11);
    EXPECT_NEAR(DD(j, 0), -36 * pi * pi * X(j, 0), 1e-9);
  }
}

TEST(Spectral, MatricesAgreeWithTransforms) {
  const int N = 32;
  std::mt19937_64 rng(1);
  Mat X(N, 2);
  X.col(0) = test::random_vec(rng, N);
  X.col(1) = test::random_vec(rng, N);
  EXPECT_LE((d1_matrix(N) * X - derivative(X)).norm(), 1e-10);
  EXPECT_LE((d2_matrix(N) * X - second_derivative(X)).norm(), 1e-8);
}

TEST(Spectral, Fd4IsFourthOrder) {
  double prev = 0.0;
  for (int N : {32, 64, 128}) {
    const Mat X = trig(N, 1);
    const Mat exact = 2 * pi * trig(N, 1, pi / 2);
    const double err = (derivative(X, DiffScheme::fd4) - exact).cwiseAbs().maxCoeff();
    if (prev > 0) EXPECT_NEAR(std::log2(prev / err), 4.0, 0.1);
    prev = err;
  }
}

TEST(Spectral, D2IsSymmetricNegative) {
  const Mat& D2 = d2_matrix(16);
  EXPECT_LE((D2 - D2.transpose()).norm(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Mat> es(D2);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-9);
}

TEST(Spectral, ShiftMovesSamples) {
  const int N = 64;
  const Mat X = trig(N, 2);
  const Mat Y = fourier_shift(X, 3.0 / N);
  for (int j = 0; j < N; ++j) EXPECT_NEAR(Y((j + 3) % N, 0), X(j, 0), 1e-12);
  const Mat Z = fourier_shift(X, 0.1);
  EXPECT_LE((Z - trig(N, 2, -2 * 2 * pi * 0.1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectral, ResolventInvertsOperator) {
  const int N = 32;
  std::mt19937_64 rng(2);
  Mat X(N, 1);
  X.col(0) = test::random_vec(rng, N);
  const double c = 3.0;
  const Mat Y = resolvent_multiplier(X, c);
  EXPECT_LE((c * Y - second_derivative(Y) - X).norm(), 1e-9);
}

TEST(Spectral, Norms) {
  const int N = 128;
  const Mat X = trig(N, 1);
  EXPECT_NEAR(l2_norm(X), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(sup_norm(X), 1.0, 1e-3);
  EXPECT_NEAR(h1_norm(X), std::sqrt(0.5 * (1 + 4 * pi * pi)), 1e-10);
  EXPECT_NEAR(h1_dual_norm(X), std::sqrt(0.5 / (1 + 4 * pi * pi)), 1e-12);
  Vec a = Vec::Constant(N, -2.0);
  EXPECT_NEAR(l1_norm(a), 2.0, 1e-14);
}

TEST(Spectral, TrigSeriesInterpolates) {
  const int N = 32;
  const Mat X = trig(N, 2, 0.3);
  TrigSeries ts(Vec(X.col(0)));
  for (double t : {0.013, 0.5, 0.77}) {
    EXPECT_NEAR(ts(t), std::sin(4 * pi * t + 0.3), 1e-12);
    EXPECT_NEAR(ts.derivative(t), 4 * pi * std::cos(4 * pi * t + 0.3), 1e-10);
  }
  EXPECT_NEAR(ts.mean(), 0.0, 1e-14);
}

TEST(Spectral, SchemeNames) {
  EXPECT_EQ(parse_scheme(scheme_name(DiffScheme::fd4)), DiffScheme::fd4);
  EXPECT_EQ(parse_scheme("spectral"), DiffScheme::spectral);
  EXPECT_THROW(parse_scheme("bogus"), std::exception);
}
