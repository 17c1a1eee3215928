#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitlab/periodic_ode.hpp"
#include "orbitlab/scenario.hpp"
#include "orbitlab/spectral.hpp"

namespace orbitlab::harness {

struct RunConfig {
  std::string command = "claims";  // geodesic expand solve sweep reduce green-audit claims
  std::string scenario_name = "circle";
  geometry::ScenarioSpec scenario;
  periodic_ode::Mode mode = periodic_ode::Mode::repulsive;
  std::vector<int> geodesic_class = {1};
  int N = 256;
  std::vector<double> eps;  // explicit or derived from T via eps = T^(-1/2)
  std::vector<double> T;
  int k_min = 10, k_max = 100;
  std::vector<double> lambda;  // green-audit, 2pi-time
  int trials = 100;
  std::uint64_t seed = 1;
  spectral::DiffScheme scheme = spectral::DiffScheme::spectral;
  std::string out_dir = "orbitlab-out";
  std::vector<int> claims;  // empty: all
  double energy_cap = 0.0;  // 0: 2 L0(seed geodesic) + 1
  bool symmetric_kernel = false;  // accept a symmetry-induced Jacobi kernel

  geometry::Scenario make_scenario() const;
};

// "a:b:logxK" (K points per decade, endpoints included, sign kept),
// "a,b,c" or a single number.
std::vector<double> parse_grid(const std::string& spec);
std::vector<int> parse_int_list(const std::string& spec);

// Built-in scenario presets with optional overrides applied by the caller.
geometry::ScenarioSpec scenario_preset(const std::string& name);

// JSON config. Errors are ConfigError with "origin:line: field: message".
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

// Fills eps from T (or T from eps) and checks invariants; throws ConfigError.
void finalize(RunConfig& cfg);

}  // namespace orbitlab::harness
