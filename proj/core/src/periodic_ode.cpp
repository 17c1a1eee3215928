#include "orbitlab/periodic_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

#include "orbitlab/errors.hpp"
#include "orbitlab/spectral.hpp"

namespace orbitlab::periodic_ode {

using std::numbers::pi;
using cplx = std::complex<double>;

std::string mode_name(Mode m) { return m == Mode::repulsive ? "repulsive" : "attractive"; }

Mode parse_mode(const std::string& s) {
  if (s == "repulsive") return Mode::repulsive;
  if (s == "attractive") return Mode::attractive;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

double lambda_to_period_one(double l) { return 4 * pi * pi * l; }
double lambda_to_2pi(double l) { return l / (4 * pi * pi); }

double green(double lambda, double t) {
  t -= std::floor(t);
  if (lambda < 0) {
    const double mu = std::sqrt(-lambda);
    // cosh(mu (t - 1/2)) / sinh(mu / 2) without overflow
    const double ratio = (std::exp(mu * (t - 1.0)) + std::exp(-mu * t)) / (1.0 - std::exp(-mu));
    return -ratio / (2 * mu);
  }
  const double w = std::sqrt(lambda);
  return std::cos(w * (t - 0.5)) / (2 * w * std::sin(0.5 * w));
}

double green_sup(double lambda) {
  if (lambda < 0) {
    const double mu = std::sqrt(-lambda);
    return 1.0 / (std::tanh(0.5 * mu) * 2 * mu);
  }
  const double w = std::sqrt(lambda);
  // |cos| peaks at t = 1/2
  return 1.0 / (2 * w * std::abs(std::sin(0.5 * w)));
}

namespace {
// int_0^x |cos u| du for x >= 0
double abs_cos_integral(double x) {
  if (x <= 0.5 * pi) return std::sin(x);
  const double xp = x - 0.5 * pi;
  const double m = std::floor(xp / pi);
  const double r = xp - m * pi;
  return 1.0 + 2.0 * m + (1.0 - std::cos(r));
}
}  // namespace

double green_l1(double lambda) {
  if (lambda < 0) return 1.0 / std::abs(lambda);
  const double w = std::sqrt(lambda);
  return 2.0 * abs_cos_integral(0.5 * w) / (w * 2 * w * std::abs(std::sin(0.5 * w)));
}

GreenKernel GreenKernel::make(double lambda0, int N) {
  check_resonance(lambda0);
  GreenKernel k;
  k.mode = lambda0 < 0 ? Mode::repulsive : Mode::attractive;
  k.lambda0 = lambda0;
  k.values.resize(N);
  for (int j = 0; j < N; ++j) k.values[j] = green(lambda0, static_cast<double>(j) / N);
  k.sup_norm = green_sup(lambda0);
  k.l1_norm = green_l1(lambda0);
  k.integral = 1.0 / lambda0;
  return k;
}

double resonance_distance(double lambda) {
  if (lambda < 0) return -lambda;
  // nearest in lambda, not in sqrt(lambda)
  const double k = std::floor(std::sqrt(lambda) / (2 * pi));
  return std::min(std::abs(lambda - 4 * pi * pi * k * k),
                  std::abs(lambda - 4 * pi * pi * (k + 1) * (k + 1)));
}

double operator_condition(double lambda, int N) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k <= N / 2; ++k) {
    const double d = std::abs(lambda - 4 * pi * pi * k * k);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

void check_resonance(double lambda) {
  if (resonance_distance(lambda) <= 1e-8 * std::max(1.0, std::abs(lambda))) {
    std::ostringstream os;
    os << "lambda = " << lambda << " is an eigenvalue of -d^2/dt^2 on the period-1 circle";
    throw ResonantLambda(os.str());
  }
}

namespace {

template <class Mult>
Vec apply_symbol(const Vec& sigma, Mult mult) {
  const int N = static_cast<int>(sigma.size());
  Eigen::FFT<double> fft;
  std::vector<double> in(sigma.data(), sigma.data() + N), out(N);
  std::vector<cplx> spec;
  fft.fwd(spec, in);
  for (int i = 0; i < N; ++i) spec[i] *= mult(i <= N / 2 ? i : i - N, i == N / 2);
  fft.inv(out, spec);
  return Eigen::Map<Vec>(out.data(), N);
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
const std::array<double, 8> kGLx = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                    0.9445750230732326, 0.9894009349916499};
const std::array<double, 8> kGLw = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                    0.0622535239386479, 0.0271524594117541};

}  // namespace

Vec solve_constant(double lambda0, const Vec& sigma) {
  check_resonance(lambda0);
  return apply_symbol(sigma, [lambda0](int k, bool) {
    return cplx(1.0 / (lambda0 - 4 * pi * pi * k * k), 0.0);
  });
}

Vec solve_constant_convolution(double lambda0, const Vec& sigma) {
  check_resonance(lambda0);
  const int N = static_cast<int>(sigma.size());
  const int kmax = N / 2;
  const double scale = std::sqrt(std::abs(lambda0));
  const int M = std::max({2 * kmax + 2, static_cast<int>(std::ceil(scale / 8.0)), 8});
  // Fourier coefficients of G by panel quadrature: ghat(k) = int G(tau) e^{-2 pi i k tau}
  std::vector<cplx> ghat(kmax + 1, 0.0);
  for (int p = 0; p < M; ++p) {
    const double a = static_cast<double>(p) / M, half = 0.5 / M;
    for (int q = 0; q < 16; ++q) {
      const double xi = q < 8 ? -kGLx[7 - q] : kGLx[q - 8];
      const double wq = q < 8 ? kGLw[7 - q] : kGLw[q - 8];
      const double tau = a + half * (xi + 1.0);
      const double w = half * wq * green(lambda0, tau);
      const cplx step = std::exp(cplx(0, -2 * pi * tau));
      cplx z = 1.0;
      for (int k = 0; k < kmax; ++k) {
        ghat[k] += w * z;
        z *= step;
      }
      ghat[kmax] += w * std::cos(pi * N * tau);
    }
  }
  return apply_symbol(sigma, [&](int k, bool nyq) {
    if (nyq) return cplx(ghat[kmax].real(), 0.0);
    return k >= 0 ? ghat[k] : std::conj(ghat[-k]);
  });
}

double relative_residual(double lambda0, const Vec& gamma, const Vec& sigma, const Vec& v) {
  Vec r = spectral::second_derivative(v) + lambda0 * v - sigma;
  if (gamma.size() == v.size()) r += gamma.cwiseProduct(v);
  const double ns = spectral::l2_norm(sigma);
  return spectral::l2_norm(r) / (ns > 0 ? ns : 1.0);
}

Vec solve_perturbed_direct(const PeriodicLinearProblem& p) {
  const int N = static_cast<int>(p.sigma.size());
  if (p.gamma.size() == 0) return solve_constant(p.lambda0, p.sigma);
  check_resonance(p.lambda0);
  Mat A = spectral::d2_matrix(N);
  A.diagonal().array() += p.lambda0 + p.gamma.array();
  Eigen::PartialPivLU<Mat> lu(A);
  return lu.solve(p.sigma);
}

Vec solve_perturbed_fixed_point(const PeriodicLinearProblem& p, int* iterations,
                                double* contraction, int max_iters) {
  const bool has_gamma = p.gamma.size() == p.sigma.size();
  Vec v = solve_constant(p.lambda0, p.sigma);
  double prev_inc = -1.0, worst = 0.0;
  int it = 0;
  if (has_gamma) {
    for (it = 1; it <= max_iters; ++it) {
      const Vec vn = solve_constant(p.lambda0, p.sigma - p.gamma.cwiseProduct(v));
      const double inc = (vn - v).cwiseAbs().maxCoeff();
      v = vn;
      const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
      if (prev_inc > 0 && inc > 1e-14 * scale) {
        const double ratio = inc / prev_inc;
        worst = std::max(worst, ratio);
        if (ratio >= 1.0 && it > 2) {
          std::ostringstream os;
          os << "fixed-point iteration not contracting (ratio " << ratio << ")";
          throw FixedPointDiverged(os.str());
        }
      }
      prev_inc = inc;
      if (inc <= 1e-12 * scale) break;
    }
    if (it > max_iters) throw FixedPointDiverged("fixed-point iteration did not converge");
  }
  if (iterations) *iterations = it;
  if (contraction) *contraction = worst;
  return v;
}

PerturbedSolution solve_perturbed(const PeriodicLinearProblem& p, bool cross_check) {
  PerturbedSolution s;
  s.v = solve_perturbed_direct(p);
  s.residual = relative_residual(p.lambda0, p.gamma, p.sigma, s.v);
  const double l1 = spectral::l1_norm(p.sigma);
  s.estimate_ratio = l1 > 0 ? s.v.cwiseAbs().maxCoeff() * 2 * std::sqrt(std::abs(p.lambda0)) / l1 : 0.0;
  if (cross_check) {
    const Vec vf = solve_perturbed_fixed_point(p, &s.fp_iterations, &s.fp_contraction);
    const double vs = std::max(s.v.cwiseAbs().maxCoeff(), 1e-300);
    s.fp_direct_gap = (vf - s.v).cwiseAbs().maxCoeff() / vs;
  }
  return s;
}

std::vector<double> resonance_epsilons(double b0, int k_min, int k_max) {
  if (!(b0 > 0)) throw std::invalid_argument("resonance_epsilons: b0 must be positive");
  std::vector<double> out;
  for (int k = k_min; k <= k_max; ++k) out.push_back(b0 / std::pow(2 * pi * (k + 0.5), 2));
  return out;
}

std::vector<AuditRow> estimate_audit(Mode mode, const std::vector<double>& lambdas_2pi, int trials,
                                     std::uint64_t seed, int N, double delta) {
  std::vector<AuditRow> rows;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double l2 : lambdas_2pi) {
    const double l1 = lambda_to_period_one(l2);
    if ((mode == Mode::repulsive) != (l1 < 0))
      throw std::invalid_argument("estimate_audit: lambda sign does not match the mode");
    double worst_sup = 0.0, worst_l1 = 0.0;
    for (int tr = 0; tr <= trials; ++tr) {
      Vec sigma(N);
      if (tr == 0) {
        sigma.setZero();
        sigma[0] = N;  // discrete delta, unit mass
      } else {
        for (int j = 0; j < N; ++j) sigma[j] = U(rng);
      }
      const Vec v = solve_constant(l1, sigma);
      const double vinf = v.cwiseAbs().maxCoeff();
      worst_sup = std::max(worst_sup, vinf / spectral::l1_norm(sigma));
      worst_l1 = std::max(worst_l1, vinf / sigma.cwiseAbs().maxCoeff());
    }
    AuditRow a;
    a.lambda_2pi = l2;
    a.mode = mode;
    a.bound = "sup-kernel";
    a.exact = 2 * pi * green_sup(l1);
    a.asymptotic = mode == Mode::repulsive ? 1.0 / (2 * std::sqrt(std::abs(l2)))
                                      : 1.0 / (2 * std::sqrt(l2));
    a.observed = 2 * pi * worst_sup;
    a.margin = a.exact - a.observed;
    a.ok = a.observed <= (1 + delta) * a.asymptotic;
    rows.push_back(a);
    AuditRow b = a;
    b.bound = "l1-kernel";
    b.exact = 4 * pi * pi * green_l1(l1);
    b.asymptotic = mode == Mode::repulsive ? 1.0 / std::abs(l2) : 2.0 / std::sqrt(l2);
    b.observed = 4 * pi * pi * worst_l1;
    b.margin = b.exact - b.observed;
    b.ok = b.observed <= (1 + delta) * b.asymptotic;
    rows.push_back(b);
  }
  return rows;
}

}  // namespace orbitlab::periodic_ode
