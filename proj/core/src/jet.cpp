#include "orbitlab/jet.hpp"

namespace orbitlab {

Jet3 Jet3::constant(int dim, double c) {
  Jet3 j;
  j.dim = dim;
  j.v = c;
  return j;
}

Jet3 Jet3::variable(int dim, int index, double value) {
  Jet3 j = constant(dim, value);
  j.g[index] = 1.0;
  return j;
}

Jet3 operator+(const Jet3& a, const Jet3& b) {
  Jet3 r = a;
  r.v += b.v;
  for (int i = 0; i < 3; ++i) r.g[i] += b.g[i];
  for (int i = 0; i < 9; ++i) r.h[i] += b.h[i];
  for (int i = 0; i < 27; ++i) r.t[i] += b.t[i];
  return r;
}

Jet3 operator-(const Jet3& a) {
  Jet3 r = a;
  r.v = -r.v;
  for (auto& x : r.g) x = -x;
  for (auto& x : r.h) x = -x;
  for (auto& x : r.t) x = -x;
  return r;
}

Jet3 operator-(const Jet3& a, const Jet3& b) { return a + (-b); }

Jet3 operator*(const Jet3& a, const Jet3& b) {
  const int n = a.dim;
  Jet3 r = Jet3::constant(n, a.v * b.v);
  for (int i = 0; i < n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.h[3 * i + j] = a.hess(i, j) * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] +
                       a.v * b.hess(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        r.t[9 * i + 3 * j + k] =
            a.third(i, j, k) * b.v + a.hess(i, j) * b.g[k] +
            a.hess(i, k) * b.g[j] + a.hess(j, k) * b.g[i] +
            a.g[i] * b.hess(j, k) + a.g[j] * b.hess(i, k) +
            a.g[k] * b.hess(i, j) + a.v * b.third(i, j, k);
      }
  return r;
}

Jet3 compose(const Jet3& a, double f0, double f1, double f2, double f3) {
  const int n = a.dim;
  Jet3 r = Jet3::constant(n, f0);
  for (int i = 0; i < n; ++i) r.g[i] = f1 * a.g[i];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.h[3 * i + j] = f2 * a.g[i] * a.g[j] + f1 * a.hess(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        r.t[9 * i + 3 * j + k] =
            f3 * a.g[i] * a.g[j] * a.g[k] +
            f2 * (a.hess(i, j) * a.g[k] + a.hess(i, k) * a.g[j] +
                  a.hess(j, k) * a.g[i]) +
            f1 * a.third(i, j, k);
  return r;
}

Jet3 sqrt(const Jet3& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v), 0.375 / (s * a.v * a.v));
}

Jet3 reciprocal(const Jet3& a) {
  const double x = a.v;
  return compose(a, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x),
                 -6.0 / (x * x * x * x));
}

Jet3 square(const Jet3& a) { return a * a; }

Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }

Jet3 operator+(const Jet3& a, double c) {
  Jet3 r = a;
  r.v += c;
  return r;
}
Jet3 operator+(double c, const Jet3& a) { return a + c; }
Jet3 operator-(const Jet3& a, double c) { return a + (-c); }
Jet3 operator-(double c, const Jet3& a) { return (-a) + c; }

Jet3 operator*(const Jet3& a, double c) {
  Jet3 r = a;
  r.v *= c;
  for (auto& x : r.g) x *= c;
  for (auto& x : r.h) x *= c;
  for (auto& x : r.t) x *= c;
  return r;
}
Jet3 operator*(double c, const Jet3& a) { return a * c; }

}  // namespace orbitlab
