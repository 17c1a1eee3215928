#pragma once

#include <cstdint>

#include <vector>

#include "orbitlab/scenario.hpp"
#include "orbitlab/spectral.hpp"

namespace orbitlab::loops {

using spectral::DiffScheme;

// N samples of a 1-periodic curve, one row per sample t_j = j / N.
struct Loop {
  Mat X;
  bool on_manifold = false;

  int N() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }
};

// Per-sample vectors tangent to M along a base loop. The base is kept by the
// caller; the operations below take it explicitly.
struct TangentField {
  Mat V;
};

struct ReducedCoefficients {
  Vec Q;  // |H(h)[h']|^2
  Vec P;  // h' . H(h)[h']
  Vec B;  // b(h)
};

// Per-sample geometry cache along a loop on M.
struct LoopGeometry {
  std::vector<Vec> normal;
  std::vector<Mat> H;
  Vec b;
  std::vector<Vec> grad_b;
  Vec Dnb;
};
LoopGeometry loop_geometry(const geometry::Scenario& s, const Loop& h);

// Pointwise projection onto the tangent spaces.
Mat tangential_part(const LoopGeometry& g, const Mat& Z);
Vec normal_part(const LoopGeometry& g, const Mat& Z);
Mat apply_H(const LoopGeometry& g, const Mat& Z);

// Seeds.
Loop circle_cover(int N, int k, double radius = 1.0, double phase = 0.0);
Loop great_circle(int N, const Vec& axis_a, const Vec& axis_b);
Loop latitude_circle(int N, double z, double radius = 1.0);
// (p, q): p turns around the z axis, q turns around the tube.
Loop torus_loop(int N, int p, int q, double R, double r, double theta0 = 0.0,
                double phi0 = 0.0);

// Project every sample onto M; throws TubeExit if any sample is outside.
Loop project(const geometry::Scenario& s, const Mat& X);

// base + random smooth ambient perturbation (modes 1..modes, decaying as 1/k^2),
// projected back; deterministic in seed.
Loop perturbed_loop(const geometry::Scenario& s, const Loop& base, std::uint64_t seed,
                    double amplitude, int modes = 4);

double energy(const Loop& h, DiffScheme scheme = DiffScheme::spectral);

TangentField covariant_derivative(const geometry::Scenario& s, const Loop& h,
                                  const TangentField& xi,
                                  DiffScheme scheme = DiffScheme::spectral);

// L2 representative of DL0(h): -P (D1 D1 h).
TangentField energy_gradient(const geometry::Scenario& s, const Loop& h,
                             DiffScheme scheme = DiffScheme::spectral);

// Jacobi operator J k = -nabla nabla k - H(x',x') H k + H(k,x') H x',
// evaluated in the equivalent form -P k'' - H(x',x') H k.
TangentField second_variation_apply(const geometry::Scenario& s, const Loop& x0,
                                    const TangentField& k,
                                    DiffScheme scheme = DiffScheme::spectral,
                                    double geodesic_tol = 1e-6);

// Dense matrix of the Jacobi operator in per-sample tangent coordinates.
// Row block j uses the tangent basis returned in `basis` (N blocks of n x (n-1)).
struct JacobiMatrix {
  Mat J;
  Mat A;  // P (D1 x I) T: tangent coordinates -> covariant derivative, rows (j, c)
  std::vector<Mat> basis;
};
JacobiMatrix jacobi_matrix(const geometry::Scenario& s, const Loop& x0,
                           DiffScheme scheme = DiffScheme::spectral);

Mat to_ambient(const std::vector<Mat>& basis, const Vec& c);
Vec to_tangent_coords(const std::vector<Mat>& basis, const Mat& Z);

struct JacobiSpectrum {
  Vec eigenvalues;
  int kernel_dim = 0;
  double threshold = 0.0;
  bool nondegenerate = false;
};
JacobiSpectrum jacobi_spectrum(const geometry::Scenario& s, const Loop& x0,
                               DiffScheme scheme = DiffScheme::spectral,
                               double rel_threshold = 1e-6);

// Winding data: circle -> {w}; torus -> {p, q}; sphere -> {} (trivial class).
std::vector<int> winding(const geometry::Scenario& s, const Loop& h);

struct DescentOptions {
  int max_iters = 3000;
  double grad_tol = 1e-8;
  DiffScheme scheme = DiffScheme::spectral;
  bool apply_gauge = true;
};

struct GeodesicResult {
  Loop loop;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> energy_history;
};

GeodesicResult find_geodesic(const geometry::Scenario& s, const Loop& seed,
                             const std::vector<int>& target_class,
                             const DescentOptions& opts = {});

// Time rotation so that sample 0 maximizes the first coordinate, plus
// constant-speed resampling; reprojects onto M when on_manifold.
Loop apply_gauge(const geometry::Scenario& s, const Loop& h);
Loop constant_speed(const Loop& h);
Loop time_shift(const Loop& h, double tau);

struct NormSplit {
  TangentField zT;
  Vec zn;
  double C0 = 1.0;  // measured two-sided H1 equivalence constant for this z
};
NormSplit norm_split(const geometry::Scenario& s, const Loop& x0, const Mat& z,
                     DiffScheme scheme = DiffScheme::spectral);

ReducedCoefficients reduced_coefficients(const geometry::Scenario& s, const Loop& h,
                                         DiffScheme scheme = DiffScheme::spectral);

}  // namespace orbitlab::loops
