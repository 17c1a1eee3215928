#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace orbitlab::harness {

enum class Status { pass, fail, inconclusive };
std::string status_name(Status s);

struct ClaimReport {
  int criterion = 0;
  std::string id;
  std::string anchor;     // short description of the property being checked
  double measured = 0.0;  // headline quantity
  double tolerance = 0.0;
  Status status = Status::fail;
  double runtime = 0.0;   // seconds
  std::string detail;     // sub-check summary
};

struct ClaimOptions {
  int N = 256;
  std::uint64_t seed = 20240601;
};

// Criteria 1..10. Unknown numbers throw std::out_of_range.
const std::vector<std::string>& claim_ids();
ClaimReport run_claim(int criterion, const ClaimOptions& opts = {});
std::vector<ClaimReport> run_claims(const std::vector<int>& criteria, const ClaimOptions& opts = {});

// Slope-claim policy: r2 below this is inconclusive.
constexpr double kMinR2 = 0.99;

// Pinned tolerances, shared by the claim suite and the pipeline.
namespace tol {
inline constexpr double kC1Radius = 1e-9;
inline constexpr double kC2SlopeLo = 1.8, kC2SlopeHi = 2.2;
inline constexpr double kC3Slope = 1.8, kC3NormalSlope = 2.0;
inline constexpr double kC4Slope = -0.5, kC4SlopeTol = 0.1;
inline constexpr double kC5Delta = 0.1, kC5Closed = 1e-10;
inline constexpr double kC6Agree = 1e-9, kC6Growth = 2.0;
inline constexpr double kC7Growth = 2.0, kC7Integrand = 1e-8, kC7Direct = 1e-8, kC7Closed = 1e-6;
inline constexpr double kC8Rel = 1e-3;
inline constexpr double kC9Resonance = 1e6;
inline constexpr double kC10Grad = 1e-4, kC10Sym = 1e-8, kC10Energy = 1e-8, kC10Equiv = 1e-8;
}  // namespace tol

// Status of a slope claim: fail beats inconclusive only when r2 is good.
Status slope_status(bool ok, double r2);
Status merge(Status a, Status b);

}  // namespace orbitlab::harness
