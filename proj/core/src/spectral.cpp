#include "orbitlab/spectral.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/FFT>
#include <vector>

namespace orbitlab::spectral {

using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

std::mutex cache_mutex;
std::map<std::tuple<int, int, int>, std::unique_ptr<Mat>> cache;

Mat build(int N, DiffScheme s, int order) {
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("grid size N must be even and >= 4");
  Mat D = Mat::Zero(N, N);
  const double h = 2 * pi / N;
  if (s == DiffScheme::spectral) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const int k = i - j;
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        if (order == 1) {
          if (k != 0) D(i, j) = 0.5 * sgn / std::tan(0.5 * k * h) * 2 * pi;
        } else {
          if (k == 0)
            D(i, j) = (-pi * pi / (3 * h * h) - 1.0 / 6.0) * 4 * pi * pi;
          else
            D(i, j) = -0.5 * sgn / std::pow(std::sin(0.5 * k * h), 2) * 4 * pi * pi;
        }
      }
    return D;
  }
  const double dt = 1.0 / N;
  auto idx = [N](int j) { return ((j % N) + N) % N; };
  for (int i = 0; i < N; ++i) {
    if (order == 1) {
      D(i, idx(i + 1)) += 8.0 / (12 * dt);
      D(i, idx(i - 1)) += -8.0 / (12 * dt);
      D(i, idx(i + 2)) += -1.0 / (12 * dt);
      D(i, idx(i - 2)) += 1.0 / (12 * dt);
    } else {
      const double w = 1.0 / (12 * dt * dt);
      D(i, i) += -30 * w;
      D(i, idx(i + 1)) += 16 * w;
      D(i, idx(i - 1)) += 16 * w;
      D(i, idx(i + 2)) += -w;
      D(i, idx(i - 2)) += -w;
    }
  }
  return D;
}

const Mat& cached(int N, DiffScheme s, int order) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_tuple(N, static_cast<int>(s), order);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Mat>(build(N, s, order))).first;
  return *it->second;
}

int wavenumber(int idx, int N) { return idx <= N / 2 ? idx : idx - N; }

// Applies a per-mode complex multiplier; the Nyquist mode gets a real one.
template <class F, class G>
Mat apply_modes(const Mat& X, F mult, G nyquist) {
  const int N = static_cast<int>(X.rows());
  Eigen::FFT<double> fft;
  Mat out(X.rows(), X.cols());
  std::vector<double> col(N), back(N);
  std::vector<cplx> spec;
  for (int c = 0; c < X.cols(); ++c) {
    for (int j = 0; j < N; ++j) col[j] = X(j, c);
    fft.fwd(spec, col);
    for (int i = 0; i < N; ++i) {
      if (i == N / 2)
        spec[i] *= nyquist();
      else
        spec[i] *= mult(wavenumber(i, N));
    }
    fft.inv(back, spec);
    for (int j = 0; j < N; ++j) out(j, c) = back[j];
  }
  return out;
}

}  // namespace

std::string scheme_name(DiffScheme s) { return s == DiffScheme::spectral ? "spectral" : "fd4"; }

DiffScheme parse_scheme(const std::string& s) {
  if (s == "spectral" || s == "fft") return DiffScheme::spectral;
  if (s == "fd4") return DiffScheme::fd4;
  throw std::invalid_argument("unknown differentiation scheme '" + s + "'");
}

const Mat& d1_matrix(int N, DiffScheme s) { return cached(N, s, 1); }
const Mat& d2_matrix(int N, DiffScheme s) { return cached(N, s, 2); }

Mat derivative(const Mat& X, DiffScheme s) {
  return d1_matrix(static_cast<int>(X.rows()), s) * X;
}

Mat second_derivative(const Mat& X, DiffScheme s) {
  return d2_matrix(static_cast<int>(X.rows()), s) * X;
}

Mat sobolev_multiplier(const Mat& X, double p) {
  const int N = static_cast<int>(X.rows());
  return apply_modes(
      X, [p](int k) { return cplx(std::pow(1.0 + 4 * pi * pi * k * k, p), 0.0); },
      [p, N]() { return cplx(std::pow(1.0 + pi * pi * N * N, p), 0.0); });
}

Mat resolvent_multiplier(const Mat& X, double c) {
  const int N = static_cast<int>(X.rows());
  return apply_modes(
      X, [c](int k) { return cplx(1.0 / (c + 4 * pi * pi * k * k), 0.0); },
      [c, N]() { return cplx(1.0 / (c + pi * pi * N * N), 0.0); });
}

Mat fourier_shift(const Mat& X, double tau) {
  const int N = static_cast<int>(X.rows());
  return apply_modes(
      X, [tau](int k) { return std::exp(cplx(0.0, -2 * pi * k * tau)); },
      [tau, N]() { return cplx(std::cos(pi * N * tau), 0.0); });
}

TrigSeries::TrigSeries(const Vec& f) : N_(static_cast<int>(f.size())) {
  Eigen::FFT<double> fft;
  std::vector<double> col(f.data(), f.data() + N_);
  std::vector<cplx> spec;
  fft.fwd(spec, col);
  c0_ = spec[0].real() / N_;
  nyq_ = spec[N_ / 2].real() / N_;
  c_.assign(spec.begin() + 1, spec.begin() + N_ / 2);
  for (auto& c : c_) c /= static_cast<double>(N_);
}

double TrigSeries::operator()(double t) const {
  double s = c0_;
  const cplx w = std::exp(cplx(0, 2 * pi * t));
  cplx z = w;
  for (const auto& c : c_) {
    s += 2 * (c * z).real();
    z *= w;
  }
  return s + nyq_ * std::cos(pi * N_ * t);
}

double TrigSeries::derivative(double t) const {
  double s = 0.0;
  const cplx w = std::exp(cplx(0, 2 * pi * t));
  cplx z = w;
  for (std::size_t k = 1; k <= c_.size(); ++k) {
    s += 2 * (c_[k - 1] * cplx(0, 2 * pi * k) * z).real();
    z *= w;
  }
  return s - nyq_ * pi * N_ * std::sin(pi * N_ * t);
}

double TrigSeries::integral_fluctuation(double t) const {
  double s = 0.0;
  const cplx w = std::exp(cplx(0, 2 * pi * t));
  cplx z = w;
  for (std::size_t k = 1; k <= c_.size(); ++k) {
    s += 2 * (c_[k - 1] / cplx(0, 2 * pi * k) * (z - 1.0)).real();
    z *= w;
  }
  return s + nyq_ * std::sin(pi * N_ * t) / (pi * N_);
}

double mean_dot(const Mat& A, const Mat& B) {
  return (A.array() * B.array()).sum() / static_cast<double>(A.rows());
}

double l2_norm(const Mat& A) { return std::sqrt(mean_dot(A, A)); }

double l1_norm(const Vec& a) { return a.cwiseAbs().sum() / static_cast<double>(a.size()); }

double sup_norm(const Mat& A) {
  double m = 0.0;
  for (int j = 0; j < A.rows(); ++j) m = std::max(m, A.row(j).norm());
  return m;
}

double h1_norm(const Mat& A, DiffScheme s) {
  const Mat dA = derivative(A, s);
  return std::sqrt(mean_dot(A, A) + mean_dot(dA, dA));
}

double h1_dual_norm(const Mat& A) { return l2_norm(sobolev_multiplier(A, -0.5)); }

Vec grid(int N) {
  Vec t(N);
  for (int j = 0; j < N; ++j) t[j] = static_cast<double>(j) / N;
  return t;
}

}  // namespace orbitlab::spectral
