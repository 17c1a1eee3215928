#pragma once

#include <string>
#include <vector>

#include "orbitlab/expansion.hpp"
#include "orbitlab/geometry.hpp"

namespace orbitlab::orbit {

using expansion::ExpansionBundle;
using loops::Loop;

struct NewtonOptions {
  int max_iters = 25;
  double tol_scale = 1e-9;   // stop when ||x'' + V'(x)/eps||_inf <= tol_scale / eps
  double cond_limit = 1e12;  // SingularJacobian above this
};

struct OrbitResult {
  Loop solution;
  double eps = 0.0;
  double residual_sup = 0.0;
  int newton_iters = 0;
  std::vector<double> residual_history;
  double condition = 0.0;   // 1 / rcond of the gauged Jacobian at the last step
  double multiplier = 0.0;  // Lagrange multiplier of the phase row
  double gauge_defect = 0.0;
  std::string initial_guess = "order2";
  Mat y;      // solution - x_eps
  Mat yT;     // tangential part w.r.t. x0 (when a reference geodesic is given)
  Vec yn;
  double y_sup = 0.0, yT_sup = 0.0, yn_sup = 0.0;
};

// Newton on x'' + V'(x)/eps = 0 with one phase row <x - x_eps, x_eps'> = 0.
// `x0` (optional) is the geodesic used for the tangential/normal split of y.
OrbitResult correct_orbit(const geometry::Scenario& s, const Loop& x_eps, double eps,
                          const Loop* x0 = nullptr, const NewtonOptions& opts = {});

// Uses the order-2 bundle as initial guess (order 1 when g is unavailable).
OrbitResult correct_from_bundle(const geometry::Scenario& s, const ExpansionBundle& b, double eps,
                                const NewtonOptions& opts = {});

// 1 / rcond of the gauged Jacobian at x (no throw).
double gauged_condition(const geometry::Scenario& s, const Loop& x, double eps);

// (max - min) of |x'|^2/2 + V(x)/eps over samples, relative to the kinetic scale.
double first_integral_drift(const geometry::Scenario& s, const Loop& x, double eps);

// Sup distance after optimal time re-alignment of b onto a.
double aligned_distance(const Loop& a, const Loop& b);

// Largest eps in {1e-2, 5e-3, ...} where Newton converges in <= max_newton iterations.
double find_eps0(const geometry::Scenario& s, const ExpansionBundle& b, int max_newton = 12,
                 double eps_start = 1e-2, int max_halvings = 20);

// Contraction constant of the attractive case; Lambda -> 0 limit H A / (2 sqrt b0).
double attractive_constant(double Lambda, double H_bar, double A, double b0);

struct AttractiveResult {
  OrbitResult orbit;
  int k = 0;
  double eps_k = 0.0;
  double resonance_distance = 0.0;  // b0/eps_k to the nearest (2 pi m)^2
  double C = 0.0;
  double rho = 0.0;  // C sqrt(eps_k)
};

// Throws AdmissibilityFailed when b is not constant on M or 4 Lambda H A >= b0.
AttractiveResult attractive_correct(const geometry::Scenario& s, const ExpansionBundle& b, int k,
                                    double A, const NewtonOptions& opts = {});

struct SweepRow {
  double T = 0.0, eps = 0.0;
  double dist_C0 = 0.0, dist_C1 = 0.0;
  double corr_sup = 0.0, corr_normal_sup = 0.0;
  int newton_iters = 0;
  double cond_est = 0.0;
  double slope_C0_running = 0.0;
  double energy = 0.0;        // L0 of the rescaled orbit
  double energy_drift = 0.0;  // first-integral drift
  std::string status = "ok";  // else the error kind that stopped this row
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double slope_C0 = 0.0;
  double r2_C0 = 0.0;
  bool C1_decreasing = false;
  bool C0_decreasing = false;
  int skipped = 0;  // rows outside the regime (tube exit, Newton failure)
};

SweepReport adiabatic_sweep(const geometry::Scenario& s, const ExpansionBundle& b,
                            const std::vector<double>& T_list, const NewtonOptions& opts = {});
// Rows that leave the tube or whose Newton solve fails are kept with their
// error kind and excluded from the fits.
// Attractive variant: T_k = 1/eps_k^2 over the resonance-avoiding grid.
SweepReport attractive_sweep(const geometry::Scenario& s, const ExpansionBundle& b,
                             const std::vector<int>& k_list, double A,
                             const NewtonOptions& opts = {});

}  // namespace orbitlab::orbit
