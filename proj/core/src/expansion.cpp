#include "orbitlab/expansion.hpp"

#include <cmath>
#include <sstream>

#include "orbitlab/errors.hpp"
#include "orbitlab/geometry.hpp"

namespace orbitlab::expansion {

using geometry::Scenario;
using loops::LoopGeometry;
namespace sp = orbitlab::spectral;

namespace {

Mat normals_of(const LoopGeometry& g) {
  const int N = static_cast<int>(g.normal.size());
  Mat Nm(N, g.normal[0].size());
  for (int j = 0; j < N; ++j) Nm.row(j) = g.normal[j].transpose();
  return Nm;
}

Mat scale_rows(const Mat& M, const Vec& w) { return w.asDiagonal() * M; }

Vec row_dots(const Mat& A, const Mat& B) { return (A.array() * B.array()).rowwise().sum(); }

Mat grad_b_of(const LoopGeometry& g) {
  const int N = static_cast<int>(g.normal.size());
  Mat G(N, g.normal[0].size());
  for (int j = 0; j < N; ++j) G.row(j) = g.grad_b[j].transpose();
  return G;
}

}  // namespace

Mat ExpansionBundle::f() const { return fT + scale_rows(normals, a); }
Mat ExpansionBundle::g() const { return scale_rows(normals, gn); }

Vec compute_a(const Scenario& s, const Loop& x0, double* consistency) {
  const auto g = loops::loop_geometry(s, x0);
  const Mat xd = sp::derivative(x0.X);
  const Mat Hx = loops::apply_H(g, xd);
  const Vec hxx = row_dots(xd, Hx);
  const Vec a = hxx.cwiseQuotient(g.b);
  if (consistency) {
    const Vec acc_n = loops::normal_part(g, sp::second_derivative(x0.X));
    const double scale = std::max(1.0, hxx.cwiseAbs().maxCoeff());
    *consistency = (acc_n + hxx).cwiseAbs().maxCoeff() / scale;
  }
  return a;
}

Mat fT_rhs(const Scenario& s, const Loop& x0, const Vec& a) {
  const auto g = loops::loop_geometry(s, x0);
  const Mat xd = sp::derivative(x0.X);
  const Mat Hx = loops::apply_H(g, xd);
  const Vec adot = sp::derivative(a);
  const Mat Gb = grad_b_of(g);
  Mat r = sp::derivative(scale_rows(Hx, a)) + scale_rows(Gb, 0.5 * a.cwiseAbs2()) +
          scale_rows(Hx, adot);
  return loops::tangential_part(g, r);
}

FTResult solve_fT(const Scenario& s, const Loop& x0, const Vec& a, const FTOptions& opts) {
  const int N = x0.N(), n = x0.dim();
  FTResult res;
  const auto g = loops::loop_geometry(s, x0);
  const Mat xd = sp::derivative(x0.X);
  res.rhs = fT_rhs(s, x0, a);
  const auto jm = loops::jacobi_matrix(s, x0);
  const Vec rc = loops::to_tangent_coords(jm.basis, res.rhs);

  // H1 pairing with x0' in tangent coordinates
  const Mat cov_xd = loops::tangential_part(g, sp::derivative(xd));
  Vec cov_flat(N * n);
  for (int j = 0; j < N; ++j) cov_flat.segment(j * n, n) = cov_xd.row(j).transpose();
  const Vec w = loops::to_tangent_coords(jm.basis, xd) + jm.A.transpose() * cov_flat;

  const double xd_norm = sp::l2_norm(xd);
  const double r_norm = sp::l2_norm(res.rhs);
  res.compatibility = std::abs(sp::mean_dot(res.rhs, xd)) / (std::max(1.0, r_norm) * xd_norm);

  const int m = static_cast<int>(rc.size());
  Vec c;
  if (!opts.allow_symmetric_kernel) {
    Mat K = Mat::Zero(m + 1, m + 1);
    K.topLeftCorner(m, m) = jm.J;
    K.block(0, m, m, 1) = w;
    K.block(m, 0, 1, m) = w.transpose();
    Eigen::PartialPivLU<Mat> lu(K);
    const double rcond = lu.rcond();
    res.condition = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(res.condition <= opts.cond_limit)) {
      std::ostringstream os;
      os << "restricted Jacobi system is singular (condition " << res.condition << ")";
      throw DegenerateGeodesic(os.str());
    }
    Vec rhs(m + 1);
    rhs << rc, 0.0;
    c = lu.solve(rhs).head(m);
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(jm.J);
    const Vec& ev = es.eigenvalues();
    const double thr = opts.kernel_rel_threshold * ev.cwiseAbs().maxCoeff();
    c = Vec::Zero(m);
    double lam_min = std::numeric_limits<double>::infinity();
    res.kernel_dim = 0;
    const double rc_norm = rc.norm();
    for (int i = 0; i < m; ++i) {
      const Vec u = es.eigenvectors().col(i);
      const double proj = u.dot(rc);
      if (std::abs(ev[i]) <= thr) {
        ++res.kernel_dim;
        if (std::abs(proj) > 1e-8 * std::max(1.0, rc_norm)) {
          std::ostringstream os;
          os << "right-hand side has a component " << proj << " along a Jacobi field";
          throw DegenerateGeodesic(os.str());
        }
        continue;
      }
      lam_min = std::min(lam_min, std::abs(ev[i]));
      c += (proj / ev[i]) * u;
    }
    res.condition = ev.cwiseAbs().maxCoeff() / lam_min;
  }
  res.fT = loops::to_ambient(jm.basis, c);

  const Vec Jc = jm.J * c;
  res.equation_residual = (Jc - rc).norm() / std::sqrt(static_cast<double>(N)) / std::max(1.0, r_norm);
  const double fT_norm = sp::h1_norm(res.fT);
  const Mat cov_f = loops::tangential_part(g, sp::derivative(res.fT));
  const double pair = sp::mean_dot(res.fT, xd) + sp::mean_dot(cov_f, cov_xd);
  res.orthogonality = fT_norm > 0 ? std::abs(pair) / (fT_norm * sp::h1_norm(xd)) : 0.0;
  return res;
}

Vec compute_gn(const Scenario& s, const Loop& x0, const Vec& a, const Mat& fT) {
  const auto g = loops::loop_geometry(s, x0);
  const int N = x0.N();
  const Mat xd = sp::derivative(x0.X);
  const Mat Hx = loops::apply_H(g, xd);
  const Mat HfT = loops::apply_H(g, fT);
  const Mat covf = loops::tangential_part(g, sp::derivative(fT));
  const Vec add = sp::second_derivative(a);
  const Vec hxf = row_dots(Hx, fT);
  const Vec d_hxf = sp::derivative(hxf);
  const Mat Gb = grad_b_of(g);
  Vec gn(N);
  for (int j = 0; j < N; ++j) {
    const double b = g.b[j];
    const double quad = b * fT.row(j).dot(HfT.row(j)) + 2 * a[j] * Gb.row(j).dot(fT.row(j)) +
                        3 * g.Dnb[j] * a[j] * a[j];
    const double rhs = -0.5 * quad + Hx.row(j).dot(covf.row(j)) - add[j] +
                       a[j] * Hx.row(j).squaredNorm() + d_hxf[j];
    gn[j] = rhs / b;
  }
  return gn;
}

ExpansionBundle build_bundle(const Scenario& s, const Loop& x0, const FTOptions& opts) {
  const double grad = sp::l2_norm(loops::energy_gradient(s, x0).V);
  if (grad > 1e-6) {
    std::ostringstream os;
    os << "expansion needs a closed geodesic; energy gradient is " << grad;
    throw NotAGeodesic(os.str());
  }
  ExpansionBundle b;
  b.x0 = x0;
  b.xdot = sp::derivative(x0.X);
  b.normals = normals_of(loops::loop_geometry(s, x0));
  b.a = compute_a(s, x0, &b.a_consistency);
  const auto ft = solve_fT(s, x0, b.a, opts);
  b.fT = ft.fT;
  b.orthogonality = ft.orthogonality;
  b.compatibility = ft.compatibility;
  b.fT_equation = ft.equation_residual;
  b.condition = ft.condition;
  b.kernel_dim = ft.kernel_dim;
  b.gn = compute_gn(s, x0, b.a, b.fT);
  return b;
}

Loop assemble(const Scenario& s, const ExpansionBundle& b, double eps, int order) {
  Loop out;
  out.on_manifold = false;
  out.X = b.x0.X;
  if (order >= 1) out.X += eps * b.f();
  if (order >= 2 && b.has_g) out.X += eps * eps * b.g();
  double worst = 0.0;
  for (int j = 0; j < out.N(); ++j) {
    double off = eps * b.a[j];
    if (order >= 2 && b.has_g) off += eps * eps * b.gn[j];
    worst = std::max(worst, std::abs(off));
  }
  if (order >= 1 && worst > s.tube_radius()) {
    std::ostringstream os;
    os << "assembled orbit leaves the tube: normal offset " << worst << " at eps = " << eps;
    throw TubeExit(os.str());
  }
  for (int j = 0; j < out.N(); ++j) geometry::project_to_tube(s, out.X.row(j).transpose());
  return out;
}

namespace {
Mat force(const Scenario& s, const Mat& X) {
  Mat F(X.rows(), X.cols());
  for (int j = 0; j < X.rows(); ++j) F.row(j) = s.gradient(X.row(j).transpose()).transpose();
  return F;
}
}  // namespace

ResidualReport residual(const Scenario& s, const Loop& x, double eps, const ExpansionBundle* b) {
  ResidualReport r;
  const Mat R = sp::second_derivative(x.X) + force(s, x.X) / eps;
  r.dual = sp::h1_dual_norm(R);
  r.l2 = sp::l2_norm(R);
  r.sup = sp::sup_norm(R);
  if (b) {
    const AlphaBeta ab = alpha_beta(s, *b);
    const Mat acc0 = sp::second_derivative(b->x0.X);
    r.order0 = sp::l2_norm(acc0 + ab.alpha) / std::max(1.0, sp::l2_norm(acc0));
    const Mat acc1 = sp::second_derivative(b->f());
    r.order1 = sp::l2_norm(acc1 + ab.beta) / std::max(1.0, sp::l2_norm(acc1) + sp::l2_norm(ab.beta));
  }
  return r;
}

AlphaBeta alpha_beta(const Scenario& s, const ExpansionBundle& b) {
  const auto g = loops::loop_geometry(s, b.x0);
  const int N = b.x0.N();
  const Mat HfT = loops::apply_H(g, b.fT);
  const Mat Gb = grad_b_of(g);
  AlphaBeta ab;
  ab.alpha = scale_rows(b.normals, g.b.cwiseProduct(b.a));
  ab.beta.resize(N, b.x0.dim());
  for (int j = 0; j < N; ++j) {
    const double bj = g.b[j], aj = b.a[j];
    const double nn = bj * b.gn[j] +
                      0.5 * (bj * b.fT.row(j).dot(HfT.row(j)) + 2 * aj * Gb.row(j).dot(b.fT.row(j)) +
                             3 * g.Dnb[j] * aj * aj);
    ab.beta.row(j) = nn * b.normals.row(j) + aj * bj * HfT.row(j) + 0.5 * aj * aj * Gb.row(j);
  }
  return ab;
}

AlphaBetaReport verify_alphabeta(const Scenario& s, const ExpansionBundle& b,
                                 const std::vector<double>& eps_list) {
  const int K = static_cast<int>(eps_list.size());
  if (K < 4) throw std::invalid_argument("verify_alphabeta needs at least four eps values");
  const int N = b.x0.N(), n = b.x0.dim();
  const Mat f = b.f(), gg = b.g();
  // V'(x_eps)/eps = alpha + eps beta + eps^2 c2 + eps^3 c3
  Mat Vm(K, 4);
  for (int i = 0; i < K; ++i)
    for (int p = 0; p < 4; ++p) Vm(i, p) = std::pow(eps_list[i], p);
  const auto qr = Vm.colPivHouseholderQr();
  AlphaBetaReport rep;
  rep.closed = alpha_beta(s, b);
  rep.fitted.alpha.resize(N, n);
  rep.fitted.beta.resize(N, n);
  for (int j = 0; j < N; ++j) {
    Mat Y(K, n);
    for (int i = 0; i < K; ++i) {
      const double e = eps_list[i];
      const Vec x = (b.x0.X.row(j) + e * f.row(j) + e * e * gg.row(j)).transpose();
      Y.row(i) = s.gradient(x).transpose() / e;
    }
    const Mat C = qr.solve(Y);
    rep.fitted.alpha.row(j) = C.row(0);
    rep.fitted.beta.row(j) = C.row(1);
  }
  auto rel = [](const Mat& fit, const Mat& ref) {
    const double scale = std::max(sp::sup_norm(ref), 1e-12);
    return sp::sup_norm(fit - ref) / scale;
  };
  rep.alpha_rel_err = rel(rep.fitted.alpha, rep.closed.alpha);
  rep.beta_rel_err = rel(rep.fitted.beta, rep.closed.beta);
  return rep;
}

}  // namespace orbitlab::expansion
