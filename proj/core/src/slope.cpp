#include "orbitlab/slope.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "orbitlab/errors.hpp"

namespace orbitlab::harness {

namespace {

SlopeFit fit_logs(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit f;
  const int n = static_cast<int>(x.size());
  f.points = n;
  if (n < 2) {
    f.slope = f.intercept = f.r2 = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  double sx = 0, sy = 0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("fit_slope: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_slope: size mismatch");
  if (x.size() < 4) {
    std::ostringstream os;
    os << "fit_slope needs at least 4 points, got " << x.size();
    throw InsufficientPoints(os.str());
  }
  return fit_logs(x, y);
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& xy) {
  std::vector<double> x, y;
  for (const auto& [a, b] : xy) {
    x.push_back(a);
    y.push_back(b);
  }
  return fit_slope(x, y);
}

SlopeFit fit_slope_loose(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_logs(x, y);
}

}  // namespace orbitlab::harness
