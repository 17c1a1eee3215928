#include "orbitlab/orbit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "orbitlab/errors.hpp"
#include "orbitlab/parallel.hpp"
#include "orbitlab/periodic_ode.hpp"
#include "orbitlab/slope.hpp"

namespace orbitlab::orbit {

using geometry::Scenario;
namespace sp = orbitlab::spectral;

namespace {

Vec flatten(const Mat& X) {
  Vec v(X.size());
  const int n = static_cast<int>(X.cols());
  for (int j = 0; j < X.rows(); ++j) v.segment(j * n, n) = X.row(j).transpose();
  return v;
}

Mat unflatten(const Vec& v, int N, int n) {
  Mat X(N, n);
  for (int j = 0; j < N; ++j) X.row(j) = v.segment(j * n, n).transpose();
  return X;
}

Mat physical_residual(const Scenario& s, const Mat& X, double eps) {
  Mat F = sp::second_derivative(X);
  for (int j = 0; j < X.rows(); ++j) F.row(j) += s.gradient(X.row(j).transpose()).transpose() / eps;
  return F;
}

Mat gauged_jacobian(const Scenario& s, const Mat& X, double eps, const Mat& xd_ref) {
  const int N = static_cast<int>(X.rows()), n = static_cast<int>(X.cols());
  const int M = N * n + 1;
  const Mat& D2 = sp::d2_matrix(N);
  Mat J = Mat::Zero(M, M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int c = 0; c < n; ++c) J(i * n + c, j * n + c) = D2(i, j);
  for (int j = 0; j < N; ++j) J.block(j * n, j * n, n, n) += s.hessian(X.row(j).transpose()) / eps;
  const Vec xd = flatten(xd_ref);
  J.col(M - 1).head(N * n) = xd;
  J.row(M - 1).head(N * n) = xd.transpose() / N;
  return J;
}

double sup_rows(const Mat& A) { return sp::sup_norm(A); }

}  // namespace

OrbitResult correct_orbit(const Scenario& s, const Loop& x_eps, double eps, const Loop* x0,
                          const NewtonOptions& opts) {
  const int N = x_eps.N(), n = x_eps.dim();
  OrbitResult r;
  r.eps = eps;
  const Mat xd = sp::derivative(x_eps.X);
  const double tol = opts.tol_scale / eps;
  Mat X = x_eps.X;
  double mu = 0.0, last_step = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, x_eps.X.cwiseAbs().maxCoeff());
  int it = 0;
  for (;; ++it) {
    const Mat Fp = physical_residual(s, X, eps);
    const Mat Ft = Fp + mu * xd;
    const double res = sup_rows(Ft);
    r.residual_history.push_back(res);
    if (!std::isfinite(res)) throw NewtonDiverged("Newton residual is not finite");
    const bool stalled = res >= 0.5 * prev;
    if (res <= tol && (last_step <= 1e-13 * scale || stalled)) break;
    if (it >= opts.max_iters) {
      if (res <= tol) break;
      std::ostringstream os;
      os << "Newton did not converge in " << opts.max_iters << " iterations (residual " << res
         << ", eps " << eps << ")";
      throw NewtonDiverged(os.str());
    }
    if (it >= 3 && res > 1e3 * r.residual_history.front()) {
      std::ostringstream os;
      os << "Newton diverging at eps " << eps << " (residual " << res << ")";
      throw NewtonDiverged(os.str());
    }
    prev = res;
    const Mat J = gauged_jacobian(s, X, eps, xd);
    Eigen::PartialPivLU<Mat> lu(J);
    const double rc = lu.rcond();
    r.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(r.condition <= opts.cond_limit)) {
      std::ostringstream os;
      os << "gauged Jacobian is singular at eps " << eps << " (condition " << r.condition << ")";
      throw SingularJacobian(os.str());
    }
    Vec rhs(N * n + 1);
    rhs.head(N * n) = -flatten(Ft);
    rhs[N * n] = -sp::mean_dot(X - x_eps.X, xd);
    const Vec d = lu.solve(rhs);
    X += unflatten(d.head(N * n), N, n);
    mu += d[N * n];
    last_step = d.head(N * n).cwiseAbs().maxCoeff();
    for (int j = 0; j < N; ++j) geometry::project_to_tube(s, X.row(j).transpose());
  }
  r.newton_iters = it;
  r.solution.X = X;
  r.solution.on_manifold = false;
  r.residual_sup = sup_rows(physical_residual(s, X, eps));
  r.multiplier = mu;
  r.y = X - x_eps.X;
  r.gauge_defect = std::abs(sp::mean_dot(r.y, xd));
  r.y_sup = sup_rows(r.y);
  if (x0) {
    const auto g = loops::loop_geometry(s, *x0);
    r.yn = loops::normal_part(g, r.y);
    r.yT = loops::tangential_part(g, r.y);
    r.yn_sup = r.yn.cwiseAbs().maxCoeff();
    r.yT_sup = sup_rows(r.yT);
  }
  return r;
}

OrbitResult correct_from_bundle(const Scenario& s, const ExpansionBundle& b, double eps,
                                const NewtonOptions& opts) {
  const int order = b.has_g ? 2 : 1;
  const Loop xe = expansion::assemble(s, b, eps, order);
  OrbitResult r = correct_orbit(s, xe, eps, &b.x0, opts);
  r.initial_guess = order == 2 ? "order2" : "order1";
  return r;
}

double gauged_condition(const Scenario& s, const Loop& x, double eps) {
  const Mat J = gauged_jacobian(s, x.X, eps, sp::derivative(x.X));
  Eigen::PartialPivLU<Mat> lu(J);
  const double rc = lu.rcond();
  return rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

double first_integral_drift(const Scenario& s, const Loop& x, double eps) {
  const Mat xd = sp::derivative(x.X);
  const int N = x.N();
  Vec E(N);
  double kin = 0.0;
  for (int j = 0; j < N; ++j) {
    const double k = 0.5 * xd.row(j).squaredNorm();
    kin += k / N;
    E[j] = k + s.potential(x.X.row(j).transpose()) / eps;
  }
  const double scale = std::max(std::abs(E.mean()), kin);
  return (E.maxCoeff() - E.minCoeff()) / scale;
}

double aligned_distance(const Loop& a, const Loop& b) {
  const int N = a.N();
  int best = 0;
  double bestd = std::numeric_limits<double>::infinity();
  for (int m = 0; m < N; ++m) {
    double d = 0.0;
    for (int j = 0; j < N; ++j) d += (a.X.row(j) - b.X.row(((j - m) % N + N) % N)).squaredNorm();
    if (d < bestd) {
      bestd = d;
      best = m;
    }
  }
  auto dist = [&](double tau) { return sp::l2_norm(a.X - sp::fourier_shift(b.X, tau)); };
  double lo = (best - 1.0) / N, hi = (best + 1.0) / N;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = dist(c), fd = dist(d);
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = dist(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = dist(d);
    }
  }
  const double tau = 0.5 * (lo + hi);
  return sp::sup_norm(a.X - sp::fourier_shift(b.X, tau));
}

double find_eps0(const Scenario& s, const ExpansionBundle& b, int max_newton, double eps_start,
                 int max_halvings) {
  NewtonOptions o;
  o.max_iters = max_newton;
  double eps = eps_start;
  for (int i = 0; i <= max_halvings; ++i, eps *= 0.5) {
    try {
      correct_from_bundle(s, b, eps, o);
      return eps;
    } catch (const Error&) {
    }
  }
  throw NewtonDiverged("no eps in the halving sequence gave a converged Newton solve");
}

double attractive_constant(double Lambda, double H_bar, double A, double b0) {
  if (Lambda <= 1e-14) return H_bar * A / (2 * std::sqrt(b0));
  const double q = 4 * Lambda * H_bar * A / b0;
  return (1 - std::sqrt(1 - q)) * std::sqrt(b0) / (4 * Lambda);
}

AttractiveResult attractive_correct(const Scenario& s, const ExpansionBundle& b, int k, double A,
                                    const NewtonOptions& opts) {
  const auto bounds = geometry::scenario_bounds(s, 200, A);
  const double b0 = bounds.b_min;
  if (!(b0 > 0)) throw AdmissibilityFailed("attractive run needs b > 0 on M");
  if (bounds.b_max - bounds.b_min > geometry::kTolManifold * std::max(1.0, b0))
    throw AdmissibilityFailed("attractive run needs a constant normal Hessian on M");
  if (!bounds.attractive_admissible()) {
    std::ostringstream os;
    os << "4 Lambda H A = " << 4 * bounds.Lambda * bounds.H_bar * A << " is not below b0 = " << b0;
    throw AdmissibilityFailed(os.str());
  }
  AttractiveResult ar;
  ar.k = k;
  ar.eps_k = periodic_ode::resonance_epsilons(b0, k, k).front();
  ar.resonance_distance = periodic_ode::resonance_distance(b0 / ar.eps_k);
  ar.C = attractive_constant(bounds.Lambda, bounds.H_bar, A, b0);
  ar.rho = ar.C * std::sqrt(ar.eps_k);
  ar.orbit = correct_from_bundle(s, b, ar.eps_k, opts);
  return ar;
}

namespace {

SweepRow make_row(const Scenario& s, const ExpansionBundle& b, double T, double eps,
                  const NewtonOptions& opts) {
  const OrbitResult r = correct_from_bundle(s, b, eps, opts);
  SweepRow row;
  row.T = T;
  row.eps = eps;
  const Mat diff = r.solution.X - b.x0.X;
  row.dist_C0 = sp::sup_norm(diff);
  row.dist_C1 = std::max(row.dist_C0, sp::sup_norm(sp::derivative(diff)));
  row.corr_sup = r.y_sup;
  row.corr_normal_sup = r.yn_sup;
  row.newton_iters = r.newton_iters;
  row.cond_est = r.condition;
  row.energy = loops::energy(r.solution);
  row.energy_drift = first_integral_drift(s, r.solution, eps);
  return row;
}

template <class Fn>
SweepRow guarded_row(double T, double eps, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string kind = e.kind();
    if (kind != "TubeExit" && kind != "NewtonDiverged" && kind != "SingularJacobian" &&
        kind != "MaxItersExceeded")
      throw;
    SweepRow row;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.T = T;
    row.eps = eps;
    row.dist_C0 = row.dist_C1 = row.corr_sup = row.corr_normal_sup = nan;
    row.cond_est = row.energy = row.energy_drift = row.slope_C0_running = nan;
    row.status = kind;
    return row;
  }
}

void finish(SweepReport& rep) {
  std::vector<double> T, d;
  std::vector<const SweepRow*> ok;
  for (auto& row : rep.rows) {
    if (row.status != "ok") {
      ++rep.skipped;
      continue;
    }
    ok.push_back(&row);
    T.push_back(row.T);
    d.push_back(row.dist_C0);
    row.slope_C0_running = T.size() >= 2 ? harness::fit_slope_loose(T, d).slope
                                         : std::numeric_limits<double>::quiet_NaN();
  }
  const auto f = harness::fit_slope_loose(T, d);
  rep.slope_C0 = f.slope;
  rep.r2_C0 = f.r2;
  rep.C0_decreasing = rep.C1_decreasing = !ok.empty();
  for (std::size_t i = 1; i < ok.size(); ++i) {
    const double s0 = ok[i]->T > ok[i - 1]->T ? 1 : -1;
    if (!(s0 * (ok[i]->dist_C1 - ok[i - 1]->dist_C1) < 0)) rep.C1_decreasing = false;
    if (!(s0 * (ok[i]->dist_C0 - ok[i - 1]->dist_C0) < 0)) rep.C0_decreasing = false;
  }
}

}  // namespace

SweepReport adiabatic_sweep(const Scenario& s, const ExpansionBundle& b,
                            const std::vector<double>& T_list, const NewtonOptions& opts) {
  SweepReport rep;
  rep.rows.resize(T_list.size());
  parallel_for(static_cast<int>(T_list.size()), [&](int i) {
    const double T = T_list[i];
    const double eps = 1.0 / std::sqrt(T);
    rep.rows[i] = guarded_row(T, eps, [&] { return make_row(s, b, T, eps, opts); });
  });
  finish(rep);
  return rep;
}

SweepReport attractive_sweep(const Scenario& s, const ExpansionBundle& b,
                             const std::vector<int>& k_list, double A, const NewtonOptions& opts) {
  SweepReport rep;
  rep.rows.resize(k_list.size());
  parallel_for(static_cast<int>(k_list.size()), [&](int i) {
    const double eps_k = periodic_ode::resonance_epsilons(s.spec().b0, k_list[i], k_list[i]).front();
    rep.rows[i] = guarded_row(1.0 / (eps_k * eps_k), eps_k, [&] {
      const auto ar = attractive_correct(s, b, k_list[i], A, opts);
      const double eps = ar.eps_k;
      SweepRow row;
      row.T = 1.0 / (eps * eps);
      row.eps = eps;
      const Mat diff = ar.orbit.solution.X - b.x0.X;
      row.dist_C0 = sp::sup_norm(diff);
      row.dist_C1 = std::max(row.dist_C0, sp::sup_norm(sp::derivative(diff)));
      row.corr_sup = ar.orbit.y_sup;
      row.corr_normal_sup = ar.orbit.yn_sup;
      row.newton_iters = ar.orbit.newton_iters;
      row.cond_est = ar.orbit.condition;
      row.energy = loops::energy(ar.orbit.solution);
      row.energy_drift = first_integral_drift(s, ar.orbit.solution, eps);
      return row;
    });
  });
  finish(rep);
  return rep;
}

}  // namespace orbitlab::orbit
