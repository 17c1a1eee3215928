#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "orbitlab/claims.hpp"
#include "orbitlab/config.hpp"
#include "orbitlab/loops.hpp"

namespace orbitlab::harness {

struct RunResult {
  std::vector<ClaimReport> claims;
  std::vector<std::string> files;  // relative to the output directory
  int exit_code() const;           // 1 iff some claim failed
};

// Analytic geodesic of the class when one is known (circle covers, torus
// equators and meridians, sphere equator), else descent from a seed.
loops::Loop reference_geodesic(const geometry::Scenario& s, const std::vector<int>& cls, int N);

// Executes cfg.command, writes CSVs and manifest.csv under cfg.out_dir.
// `log` receives one line per claim.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace orbitlab::harness
