#include "orbitlab/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace orbitlab::geometry {

namespace {

std::vector<Jet3> variables(const Vec& x) {
  std::vector<Jet3> xs;
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) xs.push_back(Jet3::variable(n, i, x[i]));
  return xs;
}

}  // namespace

Scenario::Scenario(ScenarioSpec spec) : spec_(spec) {
  if (spec_.b0 == 0.0) throw std::invalid_argument("scenario: b0 must be nonzero");
  if (spec_.shape == Shape::torus && !(spec_.major > spec_.minor && spec_.minor > 0))
    throw std::invalid_argument("scenario: torus needs R > r > 0");
  if (spec_.radius <= 0) throw std::invalid_argument("scenario: radius must be positive");
}

Scenario Scenario::circle(double b0, double radius) {
  ScenarioSpec s;
  s.shape = Shape::circle;
  s.b0 = b0;
  s.radius = radius;
  return Scenario(s);
}

Scenario Scenario::sphere(double b0, double radius) {
  ScenarioSpec s;
  s.shape = Shape::sphere;
  s.b0 = b0;
  s.radius = radius;
  return Scenario(s);
}

Scenario Scenario::sphere_quartic() {
  ScenarioSpec s;
  s.shape = Shape::sphere;
  s.b0 = -2.0;
  s.c3 = 0.5;
  s.c4 = 0.125;
  return Scenario(s);
}

Scenario Scenario::torus(double b0, double major, double minor) {
  ScenarioSpec s;
  s.shape = Shape::torus;
  s.b0 = b0;
  s.major = major;
  s.minor = minor;
  return Scenario(s);
}

double Scenario::tube_radius() const {
  return spec_.shape == Shape::torus ? 0.4 * spec_.minor : 0.5 * spec_.radius;
}

std::string Scenario::name() const {
  switch (spec_.shape) {
    case Shape::circle: return "circle";
    case Shape::sphere: return "sphere";
    case Shape::torus: return "torus";
  }
  return "unknown";
}

Jet3 Scenario::distance_jet(const Vec& x) const {
  auto xs = variables(x);
  if (spec_.shape == Shape::torus) {
    Jet3 rho = sqrt(square(xs[0]) + square(xs[1]));
    Jet3 q = square(rho - spec_.major) + square(xs[2]);
    return sqrt(q) - spec_.minor;
  }
  Jet3 r2 = square(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) r2 = r2 + square(xs[i]);
  return sqrt(r2) - spec_.radius;
}

Jet3 Scenario::potential_jet(const Vec& x) const {
  const int n = dim();
  Jet3 d = distance_jet(x);
  Jet3 d2 = square(d);
  Jet3 psi = 0.5 * d2;
  if (spec_.c3 != 0.0) psi = psi + spec_.c3 * (d2 * d);
  if (spec_.c4 != 0.0) psi = psi + spec_.c4 * (d2 * d2);
  Jet3 B = Jet3::constant(n, spec_.b0);
  if (spec_.b_mod != 0.0)
    B = spec_.b0 * (1.0 + spec_.b_mod * Jet3::variable(n, 0, x[0]));
  return B * psi;
}

double Scenario::distance(const Vec& x) const {
  if (spec_.shape == Shape::torus) {
    const double rho = std::hypot(x[0], x[1]);
    return std::hypot(rho - spec_.major, x[2]) - spec_.minor;
  }
  return x.norm() - spec_.radius;
}

Vec Scenario::distance_gradient(const Vec& x) const { return jet_gradient(distance_jet(x)); }

double Scenario::potential(const Vec& x) const { return potential_jet(x).v; }
Vec Scenario::gradient(const Vec& x) const { return jet_gradient(potential_jet(x)); }
Mat Scenario::hessian(const Vec& x) const { return jet_hessian(potential_jet(x)); }

Vec Scenario::third_contract(const Vec& x, const Vec& u, const Vec& w) const {
  const Jet3 j = potential_jet(x);
  const int n = dim();
  Vec r = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) r[i] += j.third(i, a, c) * u[a] * w[c];
  return r;
}

std::vector<Vec> Scenario::manifold_samples(int count) const {
  using std::numbers::pi;
  std::vector<Vec> out;
  if (count < 1) return out;
  switch (spec_.shape) {
    case Shape::circle:
      for (int j = 0; j < count; ++j) {
        const double a = 2 * pi * j / count;
        Vec p(2);
        p << spec_.radius * std::cos(a), spec_.radius * std::sin(a);
        out.push_back(p);
      }
      break;
    case Shape::sphere: {
      const double golden = pi * (3.0 - std::sqrt(5.0));
      for (int j = 0; j < count; ++j) {
        const double z = 1.0 - 2.0 * (j + 0.5) / count;
        const double r = std::sqrt(1.0 - z * z);
        Vec p(3);
        p << r * std::cos(golden * j), r * std::sin(golden * j), z;
        out.push_back(spec_.radius * p);
      }
      break;
    }
    case Shape::torus: {
      const int m = std::max(1, static_cast<int>(std::ceil(std::sqrt(count))));
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
          const double th = 2 * pi * a / m, ph = 2 * pi * c / m;
          const double w = spec_.major + spec_.minor * std::cos(th);
          Vec p(3);
          p << w * std::cos(ph), w * std::sin(ph), spec_.minor * std::sin(th);
          out.push_back(p);
        }
      break;
    }
  }
  return out;
}

Vec jet_gradient(const Jet3& j) {
  Vec g(j.dim);
  for (int i = 0; i < j.dim; ++i) g[i] = j.g[i];
  return g;
}

Mat jet_hessian(const Jet3& j) {
  Mat h(j.dim, j.dim);
  for (int i = 0; i < j.dim; ++i)
    for (int k = 0; k < j.dim; ++k) h(i, k) = j.hess(i, k);
  return h;
}

}  // namespace orbitlab::geometry
