#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "orbitlab/claims.hpp"
#include "orbitlab/config.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/io.hpp"
#include "orbitlab/pipeline.hpp"
#include "orbitlab/slope.hpp"
#include "support.hpp"

using namespace orbitlab;
using namespace orbitlab::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("orbitlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string body(const fs::path& p) {
  std::ifstream in(p);
  std::string first, rest, line;
  std::getline(in, first);
  while (std::getline(in, line)) rest += line + "\n";
  return rest;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(FitSlope, ExactPowerLaw) {
  std::vector<double> x, y;
  for (double v : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    x.push_back(v);
    y.push_back(v * v);
  }
  const auto f = fit_slope(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  EXPECT_EQ(f.points, 5);
}

TEST(FitSlope, NoisyPowerLaw) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1e-3);
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    const double v = std::pow(10.0, -4 + 0.2 * i);
    x.push_back(v);
    y.push_back(3 * v * v * (1 + n(rng)));
  }
  EXPECT_NEAR(fit_slope(x, y).slope, 2.0, 0.02);
}

TEST(FitSlope, TooFewPoints) {
  EXPECT_THROW(fit_slope(std::vector<double>{1, 2, 3}, std::vector<double>{1, 4, 9}),
               InsufficientPoints);
}

TEST(FitSlope, NonMonotoneIsInconclusive) {
  const auto f = fit_slope(std::vector<double>{1, 2, 3, 4, 5, 6},
                           std::vector<double>{1, 5, 1, 5, 1, 5});
  EXPECT_LT(f.r2, kMinR2);
  EXPECT_EQ(slope_status(false, f.r2), Status::inconclusive);
  EXPECT_EQ(slope_status(false, 1.0), Status::fail);
  EXPECT_EQ(slope_status(true, 1.0), Status::pass);
  EXPECT_EQ(merge(Status::pass, Status::inconclusive), Status::inconclusive);
  EXPECT_EQ(merge(Status::inconclusive, Status::fail), Status::fail);
}

TEST(Grid, Forms) {
  const auto g = parse_grid("1e2:1e6:logx8");
  ASSERT_EQ(g.size(), 33u);
  EXPECT_NEAR(g.front(), 1e2, 1e-10);
  EXPECT_NEAR(g.back(), 1e6, 1e-4);
  const auto n = parse_grid("-1:-1e4:logx2");
  EXPECT_EQ(n.size(), 9u);
  EXPECT_LT(n.back(), -9999.0);
  EXPECT_EQ(parse_grid("1e-2,1e-3"), (std::vector<double>{1e-2, 1e-3}));
  EXPECT_EQ(parse_grid("0.5"), std::vector<double>{0.5});
  EXPECT_THROW(parse_grid("1:-1:logx2"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1:10:lin5"), std::invalid_argument);
  EXPECT_THROW(parse_grid("abc"), std::exception);
  EXPECT_EQ(parse_int_list("1,0"), (std::vector<int>{1, 0}));
}

TEST(Config, ParsesAndDerives) {
  const auto c = parse_config(R"({
  "command": "sweep",
  "scenario": {"name": "circle", "b0": -100},
  "class": 1,
  "T": "1e2:1e6:logx1"
})");
  EXPECT_EQ(c.command, "sweep");
  EXPECT_EQ(c.scenario.b0, -100.0);
  EXPECT_EQ(c.mode, periodic_ode::Mode::repulsive);
  ASSERT_EQ(c.eps.size(), 5u);
  EXPECT_NEAR(c.eps[0], 0.1, 1e-15);
}

TEST(Config, ErrorsCarryLineAndField) {
  EXPECT_EQ(config_error("{\n  \"command\": \"sweep\",\n  \"bogus\": 1\n}"),
            "cfg.json:3: bogus: unknown field");
  EXPECT_NE(config_error("{\n  \"N\": \"many\"\n}").find("cfg.json:2: N:"), std::string::npos);
  EXPECT_NE(config_error("{\n \"eps\": 0.1,\n \"T\": 100\n}").find(":3: T:"), std::string::npos);
  EXPECT_NE(config_error("{\n  \"command\": \"sweep\",\n  oops\n}").find("cfg.json:3"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"N": 7})").find("N must be even"), std::string::npos);
  EXPECT_NE(config_error(R"({"scenario": {"name": "circle", "b0": 1}, "mode": "repulsive"})")
                .find("mode does not match"),
            std::string::npos);
}

TEST(Csv, LoopRoundTrip) {
  const auto dir = scratch("loop");
  const auto h = loops::torus_loop(16, 1, 2, 2.0, 1.0, 0.3);
  write_loop_csv((dir / "h.csv").string(), h, "roundtrip");
  const auto r = read_loop_csv((dir / "h.csv").string());
  EXPECT_EQ(r.X, h.X);
}

TEST(Csv, RowWidthChecked) {
  const auto dir = scratch("width");
  CsvWriter w((dir / "w.csv").string(), "test", {"a", "b"});
  w.cell(1.0);
  EXPECT_THROW(w.end_row(), std::exception);
}

TEST(Csv, QuotesText) {
  const auto dir = scratch("quote");
  {
    CsvWriter w((dir / "q.csv").string(), "test", {"a", "b"});
    w.cell(std::string("x,y")).cell(2).end_row();
  }
  EXPECT_EQ(body(dir / "q.csv"), "a,b\n\"x,y\",2\n");
}

TEST(Pipeline, DeterministicBodies) {
  std::vector<std::string> bodies;
  for (int run_i = 0; run_i < 2; ++run_i) {
    RunConfig cfg = parse_config(R"({"command": "green-audit", "lambda": "-1:-1e2:logx1",
                                     "trials": 5, "seed": 4})");
    cfg.out_dir = scratch("det" + std::to_string(run_i)).string();
    const auto res = run(cfg);
    EXPECT_EQ(res.exit_code(), 0);
    std::string all;
    for (const auto& f : res.files) all += f + "\n" + body(fs::path(cfg.out_dir) / f);
    bodies.push_back(all);
  }
  EXPECT_EQ(bodies[0], bodies[1]);
  EXPECT_NE(bodies[0].find("green_audit.csv"), std::string::npos);
}

TEST(Pipeline, ClaimIdsUniqueAndReportedOnce) {
  const auto& ids = claim_ids();
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
  RunConfig cfg = parse_config(R"({"command": "claims", "claims": [5, 1]})");
  cfg.out_dir = scratch("claims").string();
  const auto res = run(cfg);
  ASSERT_EQ(res.claims.size(), 2u);
  EXPECT_NE(res.claims[0].id, res.claims[1].id);
  const std::string csv = body(fs::path(cfg.out_dir) / "claims.csv");
  for (const auto& c : res.claims) {
    const auto first = csv.find(c.id);
    ASSERT_NE(first, std::string::npos);
    EXPECT_EQ(csv.find(c.id, first + 1), std::string::npos);
  }
}

TEST(Pipeline, ReferenceGeodesics) {
  const auto tor = geometry::Scenario::torus(-1.0);
  const auto in = reference_geodesic(tor, {1, 0}, 64);
  EXPECT_NEAR(loops::energy(in), 2 * test::pi * test::pi, 1e-9);
  const auto c = reference_geodesic(geometry::Scenario::circle(-1.0), {2}, 64);
  EXPECT_NEAR(loops::energy(c), 8 * test::pi * test::pi, 1e-9);
}
