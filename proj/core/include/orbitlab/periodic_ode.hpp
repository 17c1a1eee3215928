#pragma once

// Scalar periodic problems v'' + (lambda0 + gamma(t)) v = sigma(t) on the
// period-1 circle. Values quoted on the 2*pi circle convert through
// lambda_1 = (2 pi)^2 lambda_2pi.

#include <cstdint>
#include <string>
#include <vector>

#include "orbitlab/types.hpp"

namespace orbitlab::periodic_ode {

enum class Mode { repulsive, attractive };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

double lambda_to_period_one(double lambda_2pi);
double lambda_to_2pi(double lambda_1);

struct PeriodicLinearProblem {
  double lambda0 = -1.0;  // period-1 convention
  Vec gamma;              // may be empty (no perturbation)
  Vec sigma;
};

// Analytic kernel: v = int_0^1 G(t - s) sigma(s) ds solves v'' + lambda v = sigma.
double green(double lambda, double t);
double green_sup(double lambda);  // sup |G|
double green_l1(double lambda);   // int |G|

struct GreenKernel {
  Mode mode = Mode::repulsive;
  double lambda0 = 0.0;
  Vec values;  // G(t_j)
  double sup_norm = 0.0;
  double l1_norm = 0.0;
  double integral = 0.0;  // equals 1 / lambda0

  static GreenKernel make(double lambda0, int N);
};

// Throws ResonantLambda if lambda is within 1e-8 (relative) of (2 pi k)^2.
void check_resonance(double lambda);
double resonance_distance(double lambda);  // to the nearest (2 pi k)^2
// max/min |lambda - (2 pi k)^2| over the modes of an N-point grid; inf at resonance.
double operator_condition(double lambda, int N);

// Spectral division (production path).
Vec solve_constant(double lambda0, const Vec& sigma);
// Quadrature of the analytic kernel against the trigonometric interpolant of
// sigma (independent path).
Vec solve_constant_convolution(double lambda0, const Vec& sigma);

double relative_residual(double lambda0, const Vec& gamma, const Vec& sigma, const Vec& v);

Vec solve_perturbed_direct(const PeriodicLinearProblem& p);
// Fixed point v <- solve_constant(lambda0, sigma - gamma v); throws
// FixedPointDiverged when the increment ratio reaches 1.
Vec solve_perturbed_fixed_point(const PeriodicLinearProblem& p, int* iterations = nullptr,
                                double* contraction = nullptr, int max_iters = 1000);

struct PerturbedSolution {
  Vec v;
  double residual = 0.0;
  double estimate_ratio = 0.0;  // ||v||_inf 2 sqrt|lambda0| / ||sigma||_L1
  int fp_iterations = 0;
  double fp_contraction = 0.0;
  double fp_direct_gap = 0.0;  // ||v_fp - v_direct||_inf / ||v||_inf
};

PerturbedSolution solve_perturbed(const PeriodicLinearProblem& p, bool cross_check = true);

// eps_k = b0 / (2 pi (k + 1/2))^2, k = k_min..k_max (period-1 convention).
std::vector<double> resonance_epsilons(double b0, int k_min, int k_max);

struct AuditRow {
  double lambda_2pi = 0.0;
  Mode mode = Mode::repulsive;
  std::string bound;     // "sup-kernel" (L1 forcing) or "l1-kernel" (Linf forcing)
  double exact = 0.0;    // exact kernel constant
  double asymptotic = 0.0;  // leading-order constant 1/(2 sqrt|l|), 1/|l|, 2/sqrt(l)
  double observed = 0.0; // sharpest ratio over the trials
  double margin = 0.0;   // exact - observed
  bool ok = true;
};

// Constants are reported in 2*pi-time units; ratios are invariant under the
// time rescaling so they are measured on the period-1 grid.
std::vector<AuditRow> estimate_audit(Mode mode, const std::vector<double>& lambdas_2pi,
                                     int trials, std::uint64_t seed, int N = 256,
                                     double delta = 0.1);

}  // namespace orbitlab::periodic_ode
