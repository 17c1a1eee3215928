#pragma once

// Third-order Taylor jets in up to three variables. Enough to get exact
// gradients, Hessians and third-derivative tensors of the analytic scenario
// potentials without finite differences.

#include <array>
#include <cmath>

namespace orbitlab {

struct Jet3 {
  static constexpr int kMaxDim = 3;

  int dim = 0;
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<double, 9> h{};
  std::array<double, 27> t{};

  static Jet3 constant(int dim, double c);
  static Jet3 variable(int dim, int index, double value);

  double hess(int i, int j) const { return h[3 * i + j]; }
  double third(int i, int j, int k) const { return t[9 * i + 3 * j + k]; }
};

Jet3 operator+(const Jet3& a, const Jet3& b);
Jet3 operator-(const Jet3& a, const Jet3& b);
Jet3 operator-(const Jet3& a);
Jet3 operator*(const Jet3& a, const Jet3& b);
Jet3 operator/(const Jet3& a, const Jet3& b);
Jet3 operator+(const Jet3& a, double c);
Jet3 operator+(double c, const Jet3& a);
Jet3 operator-(const Jet3& a, double c);
Jet3 operator-(double c, const Jet3& a);
Jet3 operator*(const Jet3& a, double c);
Jet3 operator*(double c, const Jet3& a);

// Composition f(a) given f and its first three derivatives at a.v.
Jet3 compose(const Jet3& a, double f0, double f1, double f2, double f3);

Jet3 sqrt(const Jet3& a);
Jet3 reciprocal(const Jet3& a);
Jet3 square(const Jet3& a);

}  // namespace orbitlab
