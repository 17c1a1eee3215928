#pragma once

#include <vector>

#include "orbitlab/loops.hpp"
#include "orbitlab/periodic_ode.hpp"

namespace orbitlab::reduction {

using loops::Loop;
using loops::ReducedCoefficients;
using loops::TangentField;
using periodic_ode::Mode;

struct NormalOptions {
  double tol = 1e-12;        // relative increment for both iterations
  int max_iters = 200;
  bool cross_check = true;   // also run the fixed-point map and compare
};

struct ReducedState {
  Loop h;
  Vec v;
  ReducedCoefficients coeffs;
  Mat normals;
  double eps = 0.0;
  Mode mode = Mode::repulsive;
  double lambda0 = 0.0;        // b_*/eps or b0/eps
  int newton_iterations = 0;
  int fp_iterations = 0;
  double fp_contraction = 0.0;
  double fp_direct_gap = 0.0;  // ||v_fp - v_newton||_inf / max(||v||_inf, tiny)
  double residual = 0.0;       // relative residual of the normal equation
  double v_sup = 0.0;
  double C_A = 0.0;            // v_sup / sqrt(eps)

  Mat u() const;  // h + v n
};

// v'' - Q v = P - (1/eps) dVbar/dv(h, v) on the loop h.
// Throws ContractionFailed (iteration fails / leaves the tube) or ResonantLambda.
ReducedState solve_normal(const geometry::Scenario& s, const Loop& h, double eps, Mode mode,
                          const NormalOptions& opts = {});

struct ReducedEnergy {
  double L_eps = 0.0;
  double L0 = 0.0;
  double G_direct = 0.0;      // L_eps - L0
  double G_integrand = 0.0;   // (1/eps) int (v dVbar/2 - Vbar)
  double G_closed = 0.0;      // G_integrand + (1/2) int v P, equal to G_direct
};

ReducedEnergy reduced_energy(const geometry::Scenario& s, const ReducedState& st);

// L2 representative of DL_eps(h): (I + v H) P grad E_eps(u), u = h + v n.
TangentField reduced_gradient(const geometry::Scenario& s, const ReducedState& st);

struct MinimizeOptions {
  int max_iters = 2000;
  double grad_tol = 1e-7;
  bool apply_gauge = true;
};

struct MinimizeResult {
  Loop h;
  double value = 0.0;       // L_eps(h)
  int iterations = 0;
  double grad_norm = 0.0;
  double L0_grad_norm = 0.0;
  std::vector<double> history;
  ReducedState state;
};

MinimizeResult minimize_reduced(const geometry::Scenario& s, const Loop& seed,
                                const std::vector<int>& target_class, double eps, Mode mode,
                                const MinimizeOptions& opts = {});

}  // namespace orbitlab::reduction
