#include "orbitlab/reduction.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "orbitlab/errors.hpp"
#include "orbitlab/geometry.hpp"

namespace orbitlab::reduction {

using geometry::Scenario;
namespace sp = orbitlab::spectral;

Mat ReducedState::u() const { return h.X + v.asDiagonal() * normals; }

namespace {

struct NormalForce {
  Vec dV;   // dVbar/dv
  Vec d2V;  // d2Vbar/dv2
};

NormalForce normal_force(const Scenario& s, const Mat& H, const Mat& Nm, const Vec& v) {
  const int N = static_cast<int>(v.size());
  NormalForce f;
  f.dV.resize(N);
  f.d2V.resize(N);
  for (int j = 0; j < N; ++j) {
    const Vec n = Nm.row(j).transpose();
    const Vec u = H.row(j).transpose() + v[j] * n;
    const Jet3 jt = s.potential_jet(u);
    f.dV[j] = geometry::jet_gradient(jt).dot(n);
    f.d2V[j] = n.dot(geometry::jet_hessian(jt) * n);
  }
  return f;
}

void check_tube(const Scenario& s, const Vec& v) {
  const double m = v.cwiseAbs().maxCoeff();
  if (!(m <= s.tube_radius())) {
    std::ostringstream os;
    os << "normal coordinate " << m << " left the tube";
    throw ContractionFailed(os.str());
  }
}

}  // namespace

ReducedState solve_normal(const Scenario& s, const Loop& h, double eps, Mode mode,
                          const NormalOptions& opts) {
  const int N = h.N();
  ReducedState st;
  st.h = h;
  st.eps = eps;
  st.mode = mode;
  st.coeffs = loops::reduced_coefficients(s, h);
  const auto g = loops::loop_geometry(s, h);
  st.normals.resize(N, h.dim());
  for (int j = 0; j < N; ++j) st.normals.row(j) = g.normal[j].transpose();
  const Vec& Q = st.coeffs.Q;
  const Vec& P = st.coeffs.P;
  const Vec& B = st.coeffs.B;

  if (mode == Mode::repulsive) {
    if (!(B.maxCoeff() < 0)) throw std::invalid_argument("solve_normal: repulsive mode needs b < 0");
    st.lambda0 = B.maxCoeff() / eps;
  } else {
    if (!(B.minCoeff() > 0)) throw std::invalid_argument("solve_normal: attractive mode needs b > 0");
    st.lambda0 = B.mean() / eps;
  }
  periodic_ode::check_resonance(st.lambda0);

  // direct Newton on the discretized equation
  const Mat& D2 = sp::d2_matrix(N);
  Vec v = Vec::Zero(N);
  int it = 0;
  double prev_step = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (; it < opts.max_iters; ++it) {
    const auto f = normal_force(s, h.X, st.normals, v);
    const Vec F = D2 * v - Q.cwiseProduct(v) - P + f.dV / eps;
    Mat J = D2;
    J.diagonal() += -Q + f.d2V / eps;
    const Vec dv = Eigen::PartialPivLU<Mat>(J).solve(-F);
    v += dv;
    check_tube(s, v);
    const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
    const double step = dv.cwiseAbs().maxCoeff();
    // round-off floor: steps stopped shrinking but are already tiny
    const bool stalled = step > 0.5 * prev_step && step <= 1e-9 * scale;
    if (step <= opts.tol * scale || v.cwiseAbs().maxCoeff() == 0.0 || stalled) {
      ++it;
      converged = true;
      break;
    }
    prev_step = step;
  }
  if (!converged) throw ContractionFailed("normal equation: Newton did not converge");
  st.newton_iterations = it;
  st.v = v;

  {
    const auto f = normal_force(s, h.X, st.normals, v);
    const Vec F = D2 * v - Q.cwiseProduct(v) - P + f.dV / eps;
    const double scale = std::max({sp::l2_norm(P), sp::l2_norm(f.dV / eps), 1e-300});
    st.residual = sp::l2_norm(F) / scale;
  }

  if (opts.cross_check) {
    // v <- solution of v'' + (lambda0 + gamma) v = P - R(v)/eps, R = dVbar - B v
    periodic_ode::PeriodicLinearProblem pb;
    pb.lambda0 = st.lambda0;
    pb.gamma = (B / eps).array() - st.lambda0 - Q.array();
    Vec w = Vec::Zero(N);
    double prev = -1.0, worst = 0.0;
    int k = 0;
    for (; k < opts.max_iters; ++k) {
      const auto f = normal_force(s, h.X, st.normals, w);
      pb.sigma = P - (f.dV - B.cwiseProduct(w)) / eps;
      const Vec wn = periodic_ode::solve_perturbed_direct(pb);
      const double inc = (wn - w).cwiseAbs().maxCoeff();
      w = wn;
      check_tube(s, w);
      const double scale = std::max(w.cwiseAbs().maxCoeff(), 1e-300);
      if (prev > 0 && inc > 1e-14 * scale) {
        worst = std::max(worst, inc / prev);
        if (inc / prev >= 1.0 && k > 2) throw ContractionFailed("normal fixed-point map is not contracting");
      }
      prev = inc;
      if (inc <= opts.tol * scale || scale <= 1e-300) {
        ++k;
        break;
      }
    }
    if (k >= opts.max_iters) throw ContractionFailed("normal fixed-point map did not converge");
    st.fp_iterations = k;
    st.fp_contraction = worst;
    st.fp_direct_gap = (w - v).cwiseAbs().maxCoeff() / std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  }
  st.v_sup = v.cwiseAbs().maxCoeff();
  st.C_A = st.v_sup / std::sqrt(eps);
  return st;
}

ReducedEnergy reduced_energy(const Scenario& s, const ReducedState& st) {
  const int N = st.h.N();
  const Mat hd = sp::derivative(st.h.X);
  const Vec vd = sp::derivative(st.v);
  const Vec& Q = st.coeffs.Q;
  const Vec& P = st.coeffs.P;
  const Vec& v = st.v;
  ReducedEnergy e;
  double kin = 0.0, pot = 0.0, integrand = 0.0, vp = 0.0;
  for (int j = 0; j < N; ++j) {
    const Vec n = st.normals.row(j).transpose();
    const Vec u = st.h.X.row(j).transpose() + v[j] * n;
    const Jet3 jt = s.potential_jet(u);
    const double Vbar = jt.v;
    const double dV = geometry::jet_gradient(jt).dot(n);
    kin += 0.5 * (hd.row(j).squaredNorm() + vd[j] * vd[j] + v[j] * v[j] * Q[j] + 2 * v[j] * P[j]);
    pot += Vbar;
    integrand += 0.5 * v[j] * dV - Vbar;
    vp += v[j] * P[j];
  }
  kin /= N;
  pot /= N;
  integrand /= N;
  vp /= N;
  e.L_eps = kin - pot / st.eps;
  e.L0 = loops::energy(st.h);
  e.G_direct = e.L_eps - e.L0;
  e.G_integrand = integrand / st.eps;
  e.G_closed = e.G_integrand + 0.5 * vp;
  return e;
}

TangentField reduced_gradient(const Scenario& s, const ReducedState& st) {
  const Mat U = st.u();
  Mat G = -sp::derivative(sp::derivative(U));
  for (int j = 0; j < U.rows(); ++j) G.row(j) -= s.gradient(U.row(j).transpose()).transpose() / st.eps;
  const auto g = loops::loop_geometry(s, st.h);
  const Mat PG = loops::tangential_part(g, G);
  return {PG + st.v.asDiagonal() * loops::apply_H(g, PG)};
}

MinimizeResult minimize_reduced(const Scenario& s, const Loop& seed,
                                const std::vector<int>& target_class, double eps, Mode mode,
                                const MinimizeOptions& opts) {
  NormalOptions no;
  no.cross_check = false;
  MinimizeResult res;
  Loop h = loops::project(s, seed.X);
  const auto cls = loops::winding(s, h);
  if (!target_class.empty() && cls != target_class)
    throw std::invalid_argument("minimize_reduced: seed is not in the requested class");

  ReducedState st = solve_normal(s, h, eps, mode, no);
  double L = reduced_energy(s, st).L_eps;
  res.history.push_back(L);
  double step = 1.0, gn = 0.0;
  int it = 0;
  for (;; ++it) {
    const Mat G = reduced_gradient(s, st).V;
    gn = sp::l2_norm(G);
    if (gn <= opts.grad_tol) break;
    if (it >= opts.max_iters) {
      std::ostringstream os;
      os << "reduced descent: " << opts.max_iters << " iterations, gradient " << gn;
      throw MaxItersExceeded(os.str());
    }
    const double c = std::max(1.0, 2.0 * L);
    const auto geo = loops::loop_geometry(s, h);
    const Mat Dir = loops::tangential_part(geo, sp::resolvent_multiplier(G, c));
    const double slope = sp::mean_dot(G, Dir);
    bool accepted = false, drifted = false;
    for (double a = std::min(2.0, 2.0 * step); a > 1e-14; a *= 0.5) {
      Loop trial;
      ReducedState ts;
      try {
        trial = loops::project(s, h.X - a * Dir);
        if (!target_class.empty() && loops::winding(s, trial) != cls) {
          drifted = true;
          continue;
        }
        ts = solve_normal(s, trial, eps, mode, no);
      } catch (const TubeExit&) {
        continue;
      } catch (const ContractionFailed&) {
        continue;
      }
      const double Lt = reduced_energy(s, ts).L_eps;
      const bool floor =
          std::abs(Lt - L) <= 64 * std::numeric_limits<double>::epsilon() * std::abs(L) &&
          sp::l2_norm(reduced_gradient(s, ts).V) < 0.99 * gn;
      if ((Lt <= L - 1e-4 * a * slope && Lt < L) || floor) {
        h = trial;
        st = ts;
        L = Lt;
        step = a;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (drifted) throw ClassDrift("reduced descent: every trial step changed the class");
      std::ostringstream os;
      os << "reduced descent stalled at gradient " << gn;
      throw MaxItersExceeded(os.str());
    }
    res.history.push_back(L);
  }
  if (opts.apply_gauge && it > 0) {
    h = loops::apply_gauge(s, h);
    st = solve_normal(s, h, eps, mode, no);
    L = reduced_energy(s, st).L_eps;
    gn = sp::l2_norm(reduced_gradient(s, st).V);
  }
  if (!target_class.empty() && loops::winding(s, h) != cls)
    throw ClassDrift("reduced descent changed the homotopy class");
  res.h = h;
  res.value = L;
  res.iterations = it;
  res.grad_norm = gn;
  res.L0_grad_norm = sp::l2_norm(loops::energy_gradient(s, h).V);
  res.state = st;
  return res;
}

}  // namespace orbitlab::reduction
