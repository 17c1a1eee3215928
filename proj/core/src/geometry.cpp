#include "orbitlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orbitlab/errors.hpp"

namespace orbitlab::geometry {

namespace {

Mat tangent_basis(const Vec& n) {
  const int d = static_cast<int>(n.size());
  Mat E(d, d - 1);
  if (d == 2) {
    E << -n[1], n[0];
    return E;
  }
  // pick the coordinate axis least aligned with n
  int axis = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  Vec a = Vec::Zero(d);
  a[axis] = 1.0;
  Vec e1 = a - a.dot(n) * n;
  e1.normalize();
  Eigen::Vector3d n3 = n.head<3>(), e13 = e1.head<3>();
  Eigen::Vector3d e2 = n3.cross(e13);
  E.col(0) = e1;
  E.col(1) = e2;
  return E;
}

double third_component(const Jet3& j, const Vec& a, const Vec& b, const Vec& c) {
  double s = 0.0;
  for (int i = 0; i < j.dim; ++i)
    for (int k = 0; k < j.dim; ++k)
      for (int l = 0; l < j.dim; ++l) s += j.third(i, k, l) * a[i] * b[k] * c[l];
  return s;
}

}  // namespace

TubePoint project_to_tube(const Scenario& s, const Vec& u) {
  const double d = s.distance(u);
  if (!std::isfinite(d) || std::abs(d) > s.tube_radius()) {
    std::ostringstream os;
    os << "point at signed distance " << d << " is outside the tube of radius "
       << s.tube_radius();
    throw TubeExit(os.str());
  }
  TubePoint tp;
  tp.h = u - d * s.distance_gradient(u);
  tp.v = d;
  return tp;
}

ManifoldFrame frame_at(const Scenario& s, const Vec& x) {
  const Jet3 dj = s.distance_jet(x);
  Vec g = jet_gradient(dj);
  if (!(g.norm() >= 0.5))
    throw DegenerateNormal("distance gradient too small for a reliable normal");
  ManifoldFrame f;
  f.x = x;
  f.normal = g / g.norm();
  const int n = s.dim();
  const Mat P = Mat::Identity(n, n) - f.normal * f.normal.transpose();
  f.H_ambient = P * jet_hessian(dj) * P;
  f.H_ambient = 0.5 * (f.H_ambient + f.H_ambient.transpose()).eval();
  f.tangent = tangent_basis(f.normal);
  f.H = f.tangent.transpose() * f.H_ambient * f.tangent;
  const Jet3 vj = s.potential_jet(x);
  f.b = f.normal.dot(jet_hessian(vj) * f.normal);
  f.Lambda_local = std::abs(third_component(vj, f.normal, f.normal, f.normal));
  return f;
}

AdaptedDerivatives adapted_derivatives(const Scenario& s, const Vec& x, double tol) {
  const ManifoldFrame f = frame_at(s, x);
  const Jet3 vj = s.potential_jet(x);
  const Mat V2 = jet_hessian(vj);
  const int m = s.dim() - 1;
  const Vec& n = f.normal;

  AdaptedDerivatives ad;
  ad.b = n.dot(V2 * n);
  ad.Db.resize(m);
  ad.D3ijn.resize(m, m);
  ad.Dnb = third_component(vj, n, n, n) / 3.0;

  double viol = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec ei = f.tangent.col(i);
    ad.Db[i] = third_component(vj, ei, n, n);
    viol = std::max(viol, std::abs(ei.dot(V2 * n)));
    for (int j = 0; j < m; ++j) {
      const Vec ej = f.tangent.col(j);
      viol = std::max(viol, std::abs(ei.dot(V2 * ej)));
      ad.D3ijn(i, j) = third_component(vj, ei, ej, n);
      viol = std::max(viol, std::abs(ad.D3ijn(i, j) - ad.b * f.H(i, j)));
      for (int k = 0; k < m; ++k)
        viol = std::max(viol, std::abs(third_component(vj, ei, ej, f.tangent.col(k))));
    }
  }
  ad.grad_b = f.tangent * ad.Db;
  ad.max_violation = viol;
  if (viol > tol * std::max(1.0, std::abs(ad.b))) {
    std::ostringstream os;
    os << "adapted derivative pattern violated by " << viol;
    throw NondegeneracyViolation(os.str());
  }
  return ad;
}

PointGeometry point_geometry(const Scenario& s, const Vec& x) {
  const Jet3 dj = s.distance_jet(x);
  const Jet3 vj = s.potential_jet(x);
  const int n = s.dim();
  PointGeometry pg;
  Vec g = jet_gradient(dj);
  pg.normal = g / g.norm();
  const Mat P = Mat::Identity(n, n) - pg.normal * pg.normal.transpose();
  pg.H = P * jet_hessian(dj) * P;
  pg.H = 0.5 * (pg.H + pg.H.transpose()).eval();
  const Mat V2 = jet_hessian(vj);
  pg.b = pg.normal.dot(V2 * pg.normal);
  Vec t = Vec::Zero(n);  // V'''[., n, n]
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) t[i] += vj.third(i, k, l) * pg.normal[k] * pg.normal[l];
  pg.Dnb = pg.normal.dot(t) / 3.0;
  pg.grad_b = P * t;
  return pg;
}

ScenarioBounds scenario_bounds(const Scenario& s, int sample_count, double A) {
  ScenarioBounds sb;
  sb.A = A;
  sb.b_min = std::numeric_limits<double>::infinity();
  sb.b_max = -std::numeric_limits<double>::infinity();
  const auto pts = s.manifold_samples(sample_count);
  sb.samples = static_cast<int>(pts.size());
  for (const Vec& p : pts) {
    const ManifoldFrame f = frame_at(s, p);
    Eigen::SelfAdjointEigenSolver<Mat> es(f.H);
    sb.H_bar = std::max(sb.H_bar, es.eigenvalues().cwiseAbs().maxCoeff());
    sb.b_min = std::min(sb.b_min, f.b);
    sb.b_max = std::max(sb.b_max, f.b);
    sb.Lambda = std::max(sb.Lambda, f.Lambda_local);
  }
  sb.b_extremal = s.sign() == Sign::repulsive ? sb.b_max : sb.b_min;
  return sb;
}

}  // namespace orbitlab::geometry
