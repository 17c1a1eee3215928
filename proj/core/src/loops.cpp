#include "orbitlab/loops.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "orbitlab/errors.hpp"
#include "orbitlab/geometry.hpp"

namespace orbitlab::loops {

using geometry::Scenario;
using std::numbers::pi;
constexpr double kEpsMachine = std::numeric_limits<double>::epsilon();

LoopGeometry loop_geometry(const Scenario& s, const Loop& h) {
  LoopGeometry g;
  const int N = h.N();
  g.b.resize(N);
  g.Dnb.resize(N);
  for (int j = 0; j < N; ++j) {
    const auto pg = geometry::point_geometry(s, h.X.row(j).transpose());
    g.normal.push_back(pg.normal);
    g.H.push_back(pg.H);
    g.b[j] = pg.b;
    g.grad_b.push_back(pg.grad_b);
    g.Dnb[j] = pg.Dnb;
  }
  return g;
}

Mat tangential_part(const LoopGeometry& g, const Mat& Z) {
  Mat out = Z;
  for (int j = 0; j < Z.rows(); ++j) {
    const Vec& n = g.normal[j];
    out.row(j) -= Z.row(j).dot(n) * n.transpose();
  }
  return out;
}

Vec normal_part(const LoopGeometry& g, const Mat& Z) {
  Vec out(Z.rows());
  for (int j = 0; j < Z.rows(); ++j) out[j] = Z.row(j).dot(g.normal[j]);
  return out;
}

Mat apply_H(const LoopGeometry& g, const Mat& Z) {
  Mat out(Z.rows(), Z.cols());
  for (int j = 0; j < Z.rows(); ++j) out.row(j) = (g.H[j] * Z.row(j).transpose()).transpose();
  return out;
}

Loop circle_cover(int N, int k, double radius, double phase) {
  Loop l;
  l.X.resize(N, 2);
  for (int j = 0; j < N; ++j) {
    const double a = 2 * pi * k * j / N + phase;
    l.X(j, 0) = radius * std::cos(a);
    l.X(j, 1) = radius * std::sin(a);
  }
  l.on_manifold = true;
  return l;
}

Loop great_circle(int N, const Vec& a, const Vec& b) {
  Loop l;
  l.X.resize(N, a.size());
  for (int j = 0; j < N; ++j) {
    const double t = 2 * pi * j / N;
    l.X.row(j) = (std::cos(t) * a + std::sin(t) * b).transpose();
  }
  l.on_manifold = true;
  return l;
}

Loop latitude_circle(int N, double z, double radius) {
  Loop l;
  l.X.resize(N, 3);
  const double rho = std::sqrt(radius * radius - z * z);
  for (int j = 0; j < N; ++j) {
    const double t = 2 * pi * j / N;
    l.X.row(j) << rho * std::cos(t), rho * std::sin(t), z;
  }
  l.on_manifold = true;
  return l;
}

Loop torus_loop(int N, int p, int q, double R, double r, double theta0, double phi0) {
  Loop l;
  l.X.resize(N, 3);
  for (int j = 0; j < N; ++j) {
    const double t = static_cast<double>(j) / N;
    const double ph = 2 * pi * p * t + phi0, th = 2 * pi * q * t + theta0;
    const double w = R + r * std::cos(th);
    l.X.row(j) << w * std::cos(ph), w * std::sin(ph), r * std::sin(th);
  }
  l.on_manifold = true;
  return l;
}

Loop project(const Scenario& s, const Mat& X) {
  Loop l;
  l.X.resize(X.rows(), X.cols());
  for (int j = 0; j < X.rows(); ++j)
    l.X.row(j) = geometry::project_to_tube(s, X.row(j).transpose()).h.transpose();
  l.on_manifold = true;
  return l;
}

Loop perturbed_loop(const Scenario& s, const Loop& base, std::uint64_t seed, double amplitude,
                    int modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G(0.0, 1.0);
  const int N = base.N(), n = base.dim();
  const Vec t = spectral::grid(N);
  Mat X = base.X;
  for (int k = 1; k <= modes; ++k) {
    Vec a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = G(rng);
      b[i] = G(rng);
    }
    const double w = amplitude / (k * k * std::sqrt(2.0 * n));
    for (int j = 0; j < N; ++j) {
      const double th = 2 * pi * k * t[j];
      X.row(j) += w * (std::cos(th) * a + std::sin(th) * b).transpose();
    }
  }
  return project(s, X);
}

double energy(const Loop& h, DiffScheme scheme) {
  const Mat d = spectral::derivative(h.X, scheme);
  return 0.5 * spectral::mean_dot(d, d);
}

TangentField covariant_derivative(const Scenario& s, const Loop& h, const TangentField& xi,
                                  DiffScheme scheme) {
  const auto g = loop_geometry(s, h);
  return {tangential_part(g, spectral::derivative(xi.V, scheme))};
}

TangentField energy_gradient(const Scenario& s, const Loop& h, DiffScheme scheme) {
  const auto g = loop_geometry(s, h);
  const Mat dd = spectral::derivative(spectral::derivative(h.X, scheme), scheme);
  return {tangential_part(g, -dd)};
}

namespace {

// -P k'' - H(x',x') H k; equal to -nabla nabla k - H(x',x') H k + H(k,x') H x'
// and free of the checkerboard null mode the D1 D1 form has on even grids.
Mat jacobi_apply_raw(const LoopGeometry& g, const Mat& xdot, const Mat& K, DiffScheme scheme) {
  Mat out = -tangential_part(g, spectral::second_derivative(K, scheme));
  for (int j = 0; j < K.rows(); ++j) {
    const Vec xd = xdot.row(j).transpose();
    const Vec k = K.row(j).transpose();
    out.row(j) -= (xd.dot(g.H[j] * xd) * (g.H[j] * k)).transpose();
  }
  return out;
}

Mat tangent_basis_of(const Vec& n) {
  const int d = static_cast<int>(n.size());
  Mat E(d, d - 1);
  if (d == 2) {
    E << -n[1], n[0];
    return E;
  }
  int axis = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  Vec a = Vec::Zero(d);
  a[axis] = 1.0;
  Vec e1 = (a - a.dot(n) * n).normalized();
  Eigen::Vector3d e2 = Eigen::Vector3d(n.head<3>()).cross(Eigen::Vector3d(e1.head<3>()));
  E.col(0) = e1;
  E.col(1) = e2;
  return E;
}

}  // namespace

TangentField second_variation_apply(const Scenario& s, const Loop& x0, const TangentField& k,
                                    DiffScheme scheme, double geodesic_tol) {
  const double gn = spectral::l2_norm(energy_gradient(s, x0, scheme).V);
  if (gn > geodesic_tol) {
    std::ostringstream os;
    os << "loop is not a geodesic: gradient L2 norm " << gn;
    throw NotAGeodesic(os.str());
  }
  const auto g = loop_geometry(s, x0);
  const Mat xdot = spectral::derivative(x0.X, scheme);
  return {jacobi_apply_raw(g, xdot, k.V, scheme)};
}

JacobiMatrix jacobi_matrix(const Scenario& s, const Loop& x0, DiffScheme scheme) {
  const int N = x0.N(), n = x0.dim(), m = n - 1;
  const auto g = loop_geometry(s, x0);
  const Mat& D1 = spectral::d1_matrix(N, scheme);
  const Mat xdot = spectral::derivative(x0.X, scheme);
  JacobiMatrix jm;
  for (int j = 0; j < N; ++j) jm.basis.push_back(tangent_basis_of(g.normal[j]));

  // A = P (D1 (x) I) T, rows (i, c), columns (j, a); used for H1 pairings
  Mat& A = jm.A;
  A.resize(N * n, N * m);
  for (int i = 0; i < N; ++i) {
    const Mat P = Mat::Identity(n, n) - g.normal[i] * g.normal[i].transpose();
    for (int j = 0; j < N; ++j) A.block(i * n, j * m, n, m) = D1(i, j) * (P * jm.basis[j]);
  }
  const Mat& D2 = spectral::d2_matrix(N, scheme);
  jm.J.resize(N * m, N * m);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      jm.J.block(i * m, j * m, m, m) = -D2(i, j) * (jm.basis[i].transpose() * jm.basis[j]);
  for (int j = 0; j < N; ++j) {
    const Vec xd = xdot.row(j).transpose();
    const double hxx = xd.dot(g.H[j] * xd);
    jm.J.block(j * m, j * m, m, m) -= hxx * (jm.basis[j].transpose() * g.H[j] * jm.basis[j]);
  }
  jm.J = 0.5 * (jm.J + jm.J.transpose()).eval();
  return jm;
}

Mat to_ambient(const std::vector<Mat>& basis, const Vec& c) {
  const int N = static_cast<int>(basis.size());
  const int n = static_cast<int>(basis[0].rows()), m = static_cast<int>(basis[0].cols());
  Mat Z(N, n);
  for (int j = 0; j < N; ++j) Z.row(j) = (basis[j] * c.segment(j * m, m)).transpose();
  return Z;
}

Vec to_tangent_coords(const std::vector<Mat>& basis, const Mat& Z) {
  const int N = static_cast<int>(basis.size());
  const int m = static_cast<int>(basis[0].cols());
  Vec c(N * m);
  for (int j = 0; j < N; ++j) c.segment(j * m, m) = basis[j].transpose() * Z.row(j).transpose();
  return c;
}

JacobiSpectrum jacobi_spectrum(const Scenario& s, const Loop& x0, DiffScheme scheme,
                               double rel_threshold) {
  const auto jm = jacobi_matrix(s, x0, scheme);
  Eigen::SelfAdjointEigenSolver<Mat> es(jm.J, Eigen::EigenvaluesOnly);
  JacobiSpectrum sp;
  sp.eigenvalues = es.eigenvalues();
  sp.threshold = rel_threshold * sp.eigenvalues.cwiseAbs().maxCoeff();
  for (int i = 0; i < sp.eigenvalues.size(); ++i)
    if (std::abs(sp.eigenvalues[i]) <= sp.threshold) ++sp.kernel_dim;
  sp.nondegenerate = sp.kernel_dim == 1;
  return sp;
}

namespace {

int winding_of_angles(const Vec& ang) {
  double total = 0.0;
  const int N = static_cast<int>(ang.size());
  for (int j = 0; j < N; ++j) {
    double d = ang[(j + 1) % N] - ang[j];
    d -= 2 * pi * std::round(d / (2 * pi));
    total += d;
  }
  return static_cast<int>(std::lround(total / (2 * pi)));
}

}  // namespace

std::vector<int> winding(const Scenario& s, const Loop& h) {
  const int N = h.N();
  switch (s.spec().shape) {
    case geometry::Shape::circle: {
      Vec a(N);
      for (int j = 0; j < N; ++j) a[j] = std::atan2(h.X(j, 1), h.X(j, 0));
      return {winding_of_angles(a)};
    }
    case geometry::Shape::sphere:
      return {};
    case geometry::Shape::torus: {
      Vec ph(N), th(N);
      for (int j = 0; j < N; ++j) {
        ph[j] = std::atan2(h.X(j, 1), h.X(j, 0));
        th[j] = std::atan2(h.X(j, 2), std::hypot(h.X(j, 0), h.X(j, 1)) - s.spec().major);
      }
      return {winding_of_angles(ph), winding_of_angles(th)};
    }
  }
  return {};
}

Loop time_shift(const Loop& h, double tau) {
  Loop out = h;
  out.X = spectral::fourier_shift(h.X, tau);
  return out;
}

Loop constant_speed(const Loop& h) {
  const int N = h.N(), n = h.dim();
  const Mat d = spectral::derivative(h.X);
  Vec speed(N);
  for (int j = 0; j < N; ++j) speed[j] = d.row(j).norm();
  const spectral::TrigSeries sp(speed);
  const double L = sp.mean();
  if (L <= 0) return h;
  auto arclen = [&](double t) { return L * t + sp.integral_fluctuation(t); };
  std::vector<spectral::TrigSeries> cols;
  for (int c = 0; c < n; ++c) cols.emplace_back(h.X.col(c));
  Loop out = h;
  double t = 0.0;
  for (int j = 0; j < N; ++j) {
    const double target = L * j / N;
    for (int it = 0; it < 50; ++it) {
      const double f = arclen(t) - target;
      const double df = std::max(sp(t), 1e-3 * L);
      const double step = f / df;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    for (int c = 0; c < n; ++c) out.X(j, c) = cols[c](t);
  }
  return out;
}

Loop apply_gauge(const Scenario& s, const Loop& h) {
  const int N = h.N();
  int jmax = 0;
  for (int j = 1; j < N; ++j)
    if (h.X(j, 0) > h.X(jmax, 0)) jmax = j;
  const spectral::TrigSeries x1(h.X.col(0));
  double t = static_cast<double>(jmax) / N;
  const double dt = 1e-6;
  for (int it = 0; it < 30; ++it) {
    const double f1 = x1.derivative(t);
    const double f2 = (x1.derivative(t + dt) - x1.derivative(t - dt)) / (2 * dt);
    if (f2 >= 0) break;
    const double step = f1 / f2;
    t -= step;
    if (std::abs(step) < 1e-14) break;
  }
  Loop out = time_shift(h, -t);
  out = constant_speed(out);
  if (h.on_manifold) out = project(s, out.X);
  out.on_manifold = h.on_manifold;
  return out;
}

GeodesicResult find_geodesic(const Scenario& s, const Loop& seed,
                             const std::vector<int>& target_class, const DescentOptions& opts) {
  GeodesicResult res;
  Loop h = project(s, seed.X);
  const auto cls = winding(s, h);
  if (!target_class.empty() && cls != target_class)
    throw std::invalid_argument("find_geodesic: seed is not in the requested class");

  double E = energy(h, opts.scheme);
  res.energy_history.push_back(E);
  double step = 1.0;
  int it = 0;
  double gn = 0.0;
  for (;; ++it) {
    const Mat G = energy_gradient(s, h, opts.scheme).V;
    gn = spectral::l2_norm(G);
    if (gn <= opts.grad_tol) break;
    if (it >= opts.max_iters) {
      std::ostringstream os;
      os << "geodesic descent: " << opts.max_iters << " iterations, gradient " << gn;
      throw MaxItersExceeded(os.str());
    }
    // H1-type preconditioner with a zero-order weight of the speed scale
    const double c = std::max(1.0, 2.0 * E);
    const auto geo = loop_geometry(s, h);
    const Mat Dir = tangential_part(geo, spectral::resolvent_multiplier(G, c));
    const double slope = spectral::mean_dot(G, Dir);
    bool accepted = false, drifted = false;
    for (double sstep = std::min(2.0, 2.0 * step); sstep > 1e-14; sstep *= 0.5) {
      Loop trial;
      try {
        trial = project(s, h.X - sstep * Dir);
      } catch (const TubeExit&) {
        continue;
      }
      if (!target_class.empty() && winding(s, trial) != cls) {
        drifted = true;
        continue;
      }
      const double Et = energy(trial, opts.scheme);
      // Near the rounding floor of E the Armijo test is blind; fall back to
      // requiring a smaller gradient.
      const bool floor = std::abs(Et - E) <= 64 * kEpsMachine * E &&
                         spectral::l2_norm(energy_gradient(s, trial, opts.scheme).V) < 0.99 * gn;
      if ((Et <= E - 1e-4 * sstep * slope && Et < E) || floor) {
        h = trial;
        E = Et;
        step = sstep;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (drifted) throw ClassDrift("geodesic descent: every trial step changed the class");
      std::ostringstream os;
      os << "geodesic descent stalled at gradient " << gn;
      throw MaxItersExceeded(os.str());
    }
    res.energy_history.push_back(E);
  }
  if (opts.apply_gauge && it > 0) {
    h = apply_gauge(s, h);
    gn = spectral::l2_norm(energy_gradient(s, h, opts.scheme).V);
  }
  if (!target_class.empty() && winding(s, h) != cls)
    throw ClassDrift("geodesic descent changed the homotopy class");
  res.loop = h;
  res.iterations = it;
  res.grad_norm = gn;
  return res;
}

NormSplit norm_split(const Scenario& s, const Loop& x0, const Mat& z, DiffScheme scheme) {
  const auto g = loop_geometry(s, x0);
  NormSplit ns;
  ns.zn = normal_part(g, z);
  ns.zT.V = tangential_part(g, z);
  const double nz = spectral::h1_norm(z, scheme);
  const double nn = spectral::h1_norm(ns.zn, scheme);
  const Mat cov = tangential_part(g, spectral::derivative(ns.zT.V, scheme));
  const double nt = std::sqrt(spectral::mean_dot(ns.zT.V, ns.zT.V) + spectral::mean_dot(cov, cov));
  const double sum = nn + nt;
  if (nz > 0 && sum > 0) ns.C0 = std::max(nz / sum, sum / nz);
  return ns;
}

ReducedCoefficients reduced_coefficients(const Scenario& s, const Loop& h, DiffScheme scheme) {
  const auto g = loop_geometry(s, h);
  const Mat hd = spectral::derivative(h.X, scheme);
  const Mat Hh = apply_H(g, hd);
  ReducedCoefficients rc;
  const int N = h.N();
  rc.Q.resize(N);
  rc.P.resize(N);
  rc.B = g.b;
  for (int j = 0; j < N; ++j) {
    rc.Q[j] = Hh.row(j).squaredNorm();
    rc.P[j] = hd.row(j).dot(Hh.row(j));
  }
  return rc;
}

}  // namespace orbitlab::loops
