#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <random>

#include "orbitlab/types.hpp"

namespace orbitlab::test {

inline constexpr double pi = std::numbers::pi;

inline Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
inline Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b)));
}

}  // namespace orbitlab::test
