#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orbitlab/config.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/pipeline.hpp"

using namespace orbitlab;
using namespace orbitlab::harness;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> scenario, mode, cls, eps, T, lambda, scheme, out, claims;
  std::optional<double> b0, b_mod, c3, c4, radius, major, minor, energy_cap;
  std::optional<int> N, trials;
  std::optional<std::uint64_t> seed;
  std::vector<int> k_range;
  bool symmetric_kernel = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run config; flags override it");
  sub->add_option("--scenario", f.scenario, "circle | sphere | sphere_quartic | torus");
  sub->add_option("--b0", f.b0, "normal Hessian scale");
  sub->add_option("--b-mod", f.b_mod, "linear modulation of b along x1");
  sub->add_option("--c3", f.c3, "cubic coefficient in the distance");
  sub->add_option("--c4", f.c4, "quartic coefficient in the distance");
  sub->add_option("--radius", f.radius, "circle / sphere radius");
  sub->add_option("--major", f.major, "torus R");
  sub->add_option("--minor", f.minor, "torus r");
  sub->add_option("--mode", f.mode, "repulsive | attractive");
  sub->add_option("--class", f.cls, "winding data, e.g. 1 or 1,0");
  sub->add_option("-N,--samples", f.N, "grid size (even)");
  sub->add_option("--eps", f.eps, "eps grid: a:b:logxK or a,b,c");
  sub->add_option("--T", f.T, "period grid, eps = T^-1/2");
  sub->add_option("--k-range", f.k_range, "attractive grid k range")->expected(2);
  sub->add_option("--lambda", f.lambda, "lambda grid for green-audit (2pi-time)");
  sub->add_option("--trials", f.trials, "random trials per lambda");
  sub->add_option("--seed", f.seed, "seed for randomized trials");
  sub->add_option("--scheme", f.scheme, "spectral | fd4");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--claims", f.claims, "criteria to run, e.g. 1,2,5");
  sub->add_option("--energy-cap", f.energy_cap, "energy cap A (0: automatic)");
  sub->add_flag("--symmetric-kernel", f.symmetric_kernel,
                "accept a Jacobi kernel coming from a continuous symmetry");
}

RunConfig build(const std::string& command, const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_config(f.config);
  c.command = command;
  try {
    if (f.scenario) {
      c.scenario_name = *f.scenario;
      c.scenario = scenario_preset(*f.scenario);
    }
    auto& s = c.scenario;
    if (f.b0) s.b0 = *f.b0;
    if (f.b_mod) s.b_mod = *f.b_mod;
    if (f.c3) s.c3 = *f.c3;
    if (f.c4) s.c4 = *f.c4;
    if (f.radius) s.radius = *f.radius;
    if (f.major) s.major = *f.major;
    if (f.minor) s.minor = *f.minor;
    if (f.mode) c.mode = periodic_ode::parse_mode(*f.mode);
    else if (f.b0 || f.scenario)
      c.mode = s.b0 > 0 ? periodic_ode::Mode::attractive : periodic_ode::Mode::repulsive;
    if (f.cls) c.geodesic_class = parse_int_list(*f.cls);
    else if (f.scenario && *f.scenario == "torus" && c.geodesic_class.size() != 2)
      c.geodesic_class = {1, 0};
    else if (f.scenario && *f.scenario != "torus" && c.geodesic_class.size() == 2)
      c.geodesic_class = {1};
    if (f.N) c.N = *f.N;
    if (f.eps && f.T) throw ConfigError("--eps and --T are mutually exclusive");
    if (f.eps) {
      c.eps = parse_grid(*f.eps);
      c.T.clear();
    }
    if (f.T) {
      c.T = parse_grid(*f.T);
      c.eps.clear();
    }
    if (f.k_range.size() == 2) {
      c.k_min = f.k_range[0];
      c.k_max = f.k_range[1];
    }
    if (f.lambda) c.lambda = parse_grid(*f.lambda);
    if (f.trials) c.trials = *f.trials;
    if (f.seed) c.seed = *f.seed;
    if (f.scheme) c.scheme = spectral::parse_scheme(*f.scheme);
    if (f.out) c.out_dir = *f.out;
    if (f.claims) c.claims = parse_int_list(*f.claims);
    if (f.energy_cap) c.energy_cap = *f.energy_cap;
    if (f.symmetric_kernel) c.symmetric_kernel = true;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("command line: ") + e.what());
  }
  finalize(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitlab: slow periodic orbits near critical manifolds"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"geodesic", "find a closed geodesic in a class and its Jacobi spectrum"},
      {"expand", "build the expansion bundle and its residual table"},
      {"solve", "Newton-correct the expansion into true orbits"},
      {"sweep", "adiabatic (or attractive-grid) sweep of rescaled orbits"},
      {"reduce", "minimize the reduced functional in a class"},
      {"green-audit", "audit periodic Green kernel estimates"},
      {"claims", "run the acceptance claims"}};
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = build(command, flags);
    const auto res = run(cfg, &std::cerr);
    for (const auto& c : res.claims)
      std::printf("%-26s %-12s measured=%.6g tolerance=%.3g  %s\n", c.id.c_str(),
                  status_name(c.status).c_str(), c.measured, c.tolerance, c.detail.c_str());
    std::printf("wrote %zu files to %s\n", res.files.size() + 1, cfg.out_dir.c_str());
    return res.exit_code();
  } catch (const Error& e) {
    std::fprintf(stderr, "orbitlab: %s: %s\n", e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "orbitlab: %s\n", e.what());
    return 2;
  }
}
