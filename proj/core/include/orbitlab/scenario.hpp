#pragma once

#include <string>
#include <vector>

#include "orbitlab/jet.hpp"
#include "orbitlab/types.hpp"

namespace orbitlab::geometry {

enum class Shape { circle, sphere, torus };
enum class Sign { repulsive, attractive };

// Potential V(x) = B(x) * psi(d(x)) with d the signed distance to M,
// B(x) = b0 * (1 + b_mod * x_0) and psi(d) = d^2/2 + c3 d^3 + c4 d^4.
// b_mod = c3 = c4 = 0 gives the plain quadratic-in-distance form.
struct ScenarioSpec {
  Shape shape = Shape::circle;
  double b0 = -1.0;
  double b_mod = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double radius = 1.0;  // circle, sphere
  double major = 2.0;   // torus R
  double minor = 1.0;   // torus r
};

class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);

  static Scenario circle(double b0, double radius = 1.0);
  static Scenario sphere(double b0, double radius = 1.0);
  // -(|x|^2 - 1)^2 / 4, i.e. b0 = -2, c3 = 1/2, c4 = 1/8 on the unit sphere.
  static Scenario sphere_quartic();
  static Scenario torus(double b0, double major = 2.0, double minor = 1.0);

  const ScenarioSpec& spec() const { return spec_; }
  int dim() const { return spec_.shape == Shape::circle ? 2 : 3; }
  Sign sign() const { return spec_.b0 < 0 ? Sign::repulsive : Sign::attractive; }
  double tube_radius() const;
  std::string name() const;
  bool constant_normal_hessian() const { return spec_.b_mod == 0.0; }

  Jet3 distance_jet(const Vec& x) const;
  Jet3 potential_jet(const Vec& x) const;

  double distance(const Vec& x) const;
  Vec distance_gradient(const Vec& x) const;
  double potential(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  // Third derivative contracted: T[u, w] as a vector.
  Vec third_contract(const Vec& x, const Vec& u, const Vec& w) const;

  // Quasi-uniform samples of M (exactly on M up to rounding).
  std::vector<Vec> manifold_samples(int count) const;

 private:
  ScenarioSpec spec_;
};

Vec jet_gradient(const Jet3& j);
Mat jet_hessian(const Jet3& j);

}  // namespace orbitlab::geometry
