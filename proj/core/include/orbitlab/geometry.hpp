#pragma once

#include "orbitlab/scenario.hpp"

namespace orbitlab::geometry {

inline constexpr double kTolManifold = 1e-10;

struct TubePoint {
  Vec h;
  double v = 0.0;
};

// u = h + v n_h. Throws TubeExit outside the tube.
TubePoint project_to_tube(const Scenario& s, const Vec& u);

struct ManifoldFrame {
  Vec x;
  Vec normal;
  Mat tangent;    // n x (n-1), orthonormal columns
  Mat H;          // (n-1) x (n-1) in the tangent basis
  Mat H_ambient;  // n x n, P D^2 d P
  double b = 0.0;
  double Lambda_local = 0.0;
};

ManifoldFrame frame_at(const Scenario& s, const Vec& x);

struct AdaptedDerivatives {
  double b = 0.0;     // D2_nn V
  Vec Db;             // D3_inn V, tangent basis
  Vec grad_b;         // same, as an ambient tangent vector
  double Dnb = 0.0;   // D3_nnn V / 3
  Mat D3ijn;          // equals b H
  double max_violation = 0.0;  // largest component forced to vanish
};

// Throws NondegeneracyViolation if the vanishing pattern fails beyond tol.
AdaptedDerivatives adapted_derivatives(const Scenario& s, const Vec& x,
                                       double tol = 1e-8);

// Frame plus adapted derivatives at a point of M, computed from one jet
// evaluation. Used in the inner loops; no vanishing-pattern assertion.
struct PointGeometry {
  Vec normal;
  Mat H;  // ambient n x n
  double b = 0.0;
  Vec grad_b;  // ambient tangent vector
  double Dnb = 0.0;
};
PointGeometry point_geometry(const Scenario& s, const Vec& x);

struct ScenarioBounds {
  double H_bar = 0.0;
  double b_min = 0.0;
  double b_max = 0.0;
  double b_extremal = 0.0;  // b_* = max b (repulsive) or b0 = min b (attractive)
  double Lambda = 0.0;
  double A = 0.0;
  int samples = 0;

  bool attractive_admissible() const {
    return 4.0 * Lambda * H_bar * A < b_extremal;
  }
};

ScenarioBounds scenario_bounds(const Scenario& s, int sample_count, double A);

}  // namespace orbitlab::geometry
