#pragma once

#include <utility>
#include <vector>

namespace orbitlab::harness {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// Least squares on (log x, log y). Needs >= 4 positive pairs (InsufficientPoints).
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& xy);
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Same fit without the point-count floor; used for running slopes in reports.
SlopeFit fit_slope_loose(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace orbitlab::harness
