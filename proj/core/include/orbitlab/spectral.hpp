#pragma once

// Periodic grid machinery on [0, 1): t_j = j / N.

#include <complex>
#include <string>
#include <vector>

#include "orbitlab/types.hpp"

namespace orbitlab::spectral {

enum class DiffScheme { spectral, fd4 };

std::string scheme_name(DiffScheme s);
DiffScheme parse_scheme(const std::string& s);

// Dense circulant differentiation matrices, cached per (N, scheme).
const Mat& d1_matrix(int N, DiffScheme s = DiffScheme::spectral);
const Mat& d2_matrix(int N, DiffScheme s = DiffScheme::spectral);

// Column-wise derivatives of N x m sample arrays.
Mat derivative(const Mat& X, DiffScheme s = DiffScheme::spectral);
Mat second_derivative(const Mat& X, DiffScheme s = DiffScheme::spectral);

// Multiply each Fourier mode k of every column by m(k) = (1 + (2 pi k)^2)^p.
Mat sobolev_multiplier(const Mat& X, double p);

// Multiply mode k by 1 / (c + (2 pi k)^2), c > 0.
Mat resolvent_multiplier(const Mat& X, double c);

// Trigonometric-interpolant shift: returns X(t_j - tau).
Mat fourier_shift(const Mat& X, double tau);

// Trigonometric interpolant of one sampled column.
class TrigSeries {
 public:
  explicit TrigSeries(const Vec& samples);
  double operator()(double t) const;
  double derivative(double t) const;
  double mean() const { return c0_; }
  // Antiderivative of (f - mean), zero at t = 0.
  double integral_fluctuation(double t) const;

 private:
  int N_;
  double c0_, nyq_;
  std::vector<std::complex<double>> c_;
};

// Discrete L2 on [0,1): mean over samples.
double mean_dot(const Mat& A, const Mat& B);
double l2_norm(const Mat& A);
double l1_norm(const Vec& a);
double sup_norm(const Mat& A);  // max over rows of the Euclidean row norm
double h1_norm(const Mat& A, DiffScheme s = DiffScheme::spectral);
// H^1-dual norm via the (1 + (2 pi k)^2)^(-1/2) multiplier.
double h1_dual_norm(const Mat& A);

Vec grid(int N);

}  // namespace orbitlab::spectral
