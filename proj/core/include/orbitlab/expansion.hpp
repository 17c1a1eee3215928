#pragma once

#include <vector>

#include "orbitlab/loops.hpp"

namespace orbitlab::expansion {

using loops::Loop;

struct ExpansionBundle {
  Loop x0;
  Mat xdot;      // x0'
  Mat normals;   // n along x0, one row per sample
  Vec a;         // normal part of f
  Mat fT;        // tangential part of f
  Vec gn;        // normal part of g (g^T = 0)
  bool has_g = true;

  // diagnostics from the construction
  double a_consistency = 0.0;   // || (x0'')_n + H[x0', x0'] ||_inf / scale
  double orthogonality = 0.0;   // |<fT, x0'>_{H1}| / (||fT|| ||x0'||)
  double compatibility = 0.0;   // |<rhs, x0'>| / (max(1,||rhs||) ||x0'||)
  double fT_equation = 0.0;     // || J fT - rhs || / max(1, ||rhs||)
  double condition = 0.0;
  int kernel_dim = 1;

  Mat f() const;  // fT + a n
  Mat g() const;  // gn n
};

Vec compute_a(const geometry::Scenario& s, const Loop& x0, double* consistency = nullptr);

struct FTOptions {
  // Accept extra Jacobi fields coming from a continuous symmetry of M when the
  // right-hand side is orthogonal to them; returns the minimum-norm solution.
  bool allow_symmetric_kernel = false;
  double cond_limit = 1e10;
  double kernel_rel_threshold = 1e-6;
};

struct FTResult {
  Mat fT;
  Mat rhs;
  double orthogonality = 0.0;
  double compatibility = 0.0;
  double equation_residual = 0.0;
  double condition = 0.0;
  int kernel_dim = 1;
};

// J fT = rhs with <fT, x0'>_{H1} = 0. Throws DegenerateGeodesic.
FTResult solve_fT(const geometry::Scenario& s, const Loop& x0, const Vec& a,
                  const FTOptions& opts = {});

Mat fT_rhs(const geometry::Scenario& s, const Loop& x0, const Vec& a);

Vec compute_gn(const geometry::Scenario& s, const Loop& x0, const Vec& a, const Mat& fT);

ExpansionBundle build_bundle(const geometry::Scenario& s, const Loop& x0,
                             const FTOptions& opts = {});

// order 0: x0, 1: x0 + eps f, 2: x0 + eps f + eps^2 g. Throws TubeExit.
Loop assemble(const geometry::Scenario& s, const ExpansionBundle& b, double eps, int order = 2);

struct ResidualReport {
  double dual = 0.0;  // H^1-dual norm of x'' + V'(x)/eps
  double l2 = 0.0;
  double sup = 0.0;
  double order0 = -1.0;  // relative size of the eps^0 coefficient (bundle only)
  double order1 = -1.0;  // relative size of the eps^1 coefficient
};

ResidualReport residual(const geometry::Scenario& s, const Loop& x, double eps,
                        const ExpansionBundle* bundle = nullptr);

struct AlphaBeta {
  Mat alpha;
  Mat beta;
};
// Closed forms of the eps and eps^2 coefficients of V'(x_eps).
AlphaBeta alpha_beta(const geometry::Scenario& s, const ExpansionBundle& b);

struct AlphaBetaReport {
  AlphaBeta fitted;
  AlphaBeta closed;
  double alpha_rel_err = 0.0;
  double beta_rel_err = 0.0;
};
AlphaBetaReport verify_alphabeta(const geometry::Scenario& s, const ExpansionBundle& b,
                                 const std::vector<double>& eps_list);

}  // namespace orbitlab::expansion
