#include "orbitlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include "orbitlab/errors.hpp"

namespace orbitlab::harness {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& field,
                       const std::string& msg) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  if (!field.empty()) os << ": " << field;
  os << ": " << msg;
  throw ConfigError(os.str());
}

// Line of the first occurrence of "key": in the raw text (0 when absent).
int key_line(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

std::vector<double> grid_field(const json& v) {
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) return v.get<std::vector<double>>();
  throw std::invalid_argument("expected a grid string, number or array");
}

std::vector<int> int_list_field(const json& v) {
  if (v.is_string()) return parse_int_list(v.get<std::string>());
  if (v.is_number_integer()) return {v.get<int>()};
  if (v.is_array()) return v.get<std::vector<int>>();
  throw std::invalid_argument("expected an integer list");
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
      out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
  }
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("grid needs a:b:logxK");
  const double a = std::stod(spec.substr(0, c1));
  const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const std::string step = spec.substr(c2 + 1);
  if (step.rfind("logx", 0) != 0) throw std::invalid_argument("grid step must be logxK");
  const int K = std::stoi(step.substr(4));
  if (K < 1) throw std::invalid_argument("logxK needs K >= 1");
  if (a == 0 || b == 0 || (a < 0) != (b < 0)) throw std::invalid_argument("log grid endpoints need one sign");
  const double sgn = a < 0 ? -1.0 : 1.0;
  const double la = std::log10(std::abs(a)), lb = std::log10(std::abs(b));
  const int n = static_cast<int>(std::lround(std::abs(lb - la) * K));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i)
    out.push_back(sgn * std::pow(10.0, la + (n ? (lb - la) * i / n : 0.0)));
  return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stoi(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad integer '" + item + "'");
  }
  return out;
}

geometry::ScenarioSpec scenario_preset(const std::string& name) {
  geometry::ScenarioSpec s;
  if (name == "circle") {
    s.shape = geometry::Shape::circle;
  } else if (name == "sphere") {
    s.shape = geometry::Shape::sphere;
  } else if (name == "sphere_quartic") {
    s.shape = geometry::Shape::sphere;
    s.b0 = -2.0;
    s.c3 = 0.5;
    s.c4 = 0.125;
  } else if (name == "torus") {
    s.shape = geometry::Shape::torus;
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  return s;
}

geometry::Scenario RunConfig::make_scenario() const { return geometry::Scenario(scenario); }

void finalize(RunConfig& cfg) {
  if (!cfg.T.empty() && cfg.eps.empty()) {
    for (double t : cfg.T) {
      if (!(t > 0)) throw ConfigError("T values must be positive");
      cfg.eps.push_back(1.0 / std::sqrt(t));
    }
  } else if (!cfg.eps.empty() && cfg.T.empty()) {
    for (double e : cfg.eps) {
      if (!(e > 0)) throw ConfigError("eps values must be positive");
      cfg.T.push_back(1.0 / (e * e));
    }
  } else if (!cfg.eps.empty()) {
    bool linked = cfg.eps.size() == cfg.T.size();
    for (std::size_t i = 0; linked && i < cfg.eps.size(); ++i)
      linked = std::abs(cfg.eps[i] * cfg.eps[i] * cfg.T[i] - 1.0) < 1e-12;
    if (!linked) throw ConfigError("eps and T grids must satisfy eps^2 = 1/T");
  }
  if (cfg.N < 8 || cfg.N % 2) throw ConfigError("N must be even and >= 8");
  if (cfg.k_min > cfg.k_max || cfg.k_min < 0) throw ConfigError("bad k range");
  const bool attractive = cfg.scenario.b0 > 0;
  if (attractive != (cfg.mode == periodic_ode::Mode::attractive) && cfg.command != "green-audit")
    throw ConfigError("mode does not match the sign of b0");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    fail(origin, line, "", "syntax error");
  }
  if (!j.is_object()) fail(origin, 1, "", "top level must be an object");

  RunConfig cfg;
  static const std::vector<std::string> known = {
      "command", "scenario", "mode",   "class", "N",       "eps",         "T",
      "k_range", "lambda",   "trials", "seed",  "scheme",  "out",         "claims",
      "energy_cap", "symmetric_kernel"};
  for (const auto& [key, val] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(origin, key_line(text, key), key, "unknown field");
  }
  if (j.contains("eps") && j.contains("T"))
    fail(origin, key_line(text, "T"), "T", "eps and T grids are mutually exclusive");
  std::string field;
  try {
    field = "command";
    if (j.contains(field)) cfg.command = j[field].get<std::string>();
    field = "scenario";
    if (j.contains(field)) {
      const auto& s = j[field];
      if (s.is_string()) {
        cfg.scenario_name = s.get<std::string>();
        cfg.scenario = scenario_preset(cfg.scenario_name);
      } else {
        field = "scenario.name";
        cfg.scenario_name = s.at("name").get<std::string>();
        cfg.scenario = scenario_preset(cfg.scenario_name);
        for (const auto& [k, v] : s.items()) {
          field = "scenario." + k;
          if (k == "name") continue;
          const double x = v.get<double>();
          if (k == "b0") cfg.scenario.b0 = x;
          else if (k == "b_mod") cfg.scenario.b_mod = x;
          else if (k == "c3") cfg.scenario.c3 = x;
          else if (k == "c4") cfg.scenario.c4 = x;
          else if (k == "radius") cfg.scenario.radius = x;
          else if (k == "major") cfg.scenario.major = x;
          else if (k == "minor") cfg.scenario.minor = x;
          else throw std::invalid_argument("unknown scenario parameter");
        }
      }
    }
    field = "mode";
    cfg.mode = j.contains(field) ? periodic_ode::parse_mode(j[field].get<std::string>())
                                 : (cfg.scenario.b0 > 0 ? periodic_ode::Mode::attractive
                                                        : periodic_ode::Mode::repulsive);
    field = "class";
    if (j.contains(field)) cfg.geodesic_class = int_list_field(j[field]);
    field = "N";
    if (j.contains(field)) cfg.N = j[field].get<int>();
    field = "eps";
    if (j.contains(field)) cfg.eps = grid_field(j[field]);
    field = "T";
    if (j.contains(field)) cfg.T = grid_field(j[field]);
    field = "k_range";
    if (j.contains(field)) {
      const auto k = j[field].get<std::vector<int>>();
      if (k.size() != 2) throw std::invalid_argument("expected [k_min, k_max]");
      cfg.k_min = k[0];
      cfg.k_max = k[1];
    }
    field = "lambda";
    if (j.contains(field)) cfg.lambda = grid_field(j[field]);
    field = "trials";
    if (j.contains(field)) cfg.trials = j[field].get<int>();
    field = "seed";
    if (j.contains(field)) cfg.seed = j[field].get<std::uint64_t>();
    field = "scheme";
    if (j.contains(field)) cfg.scheme = spectral::parse_scheme(j[field].get<std::string>());
    field = "out";
    if (j.contains(field)) cfg.out_dir = j[field].get<std::string>();
    field = "claims";
    if (j.contains(field)) cfg.claims = int_list_field(j[field]);
    field = "energy_cap";
    if (j.contains(field)) cfg.energy_cap = j[field].get<double>();
    field = "symmetric_kernel";
    if (j.contains(field)) cfg.symmetric_kernel = j[field].get<bool>();
    field.clear();
    finalize(cfg);
  } catch (const ConfigError& e) {
    fail(origin, 0, "", e.what());
  } catch (const std::exception& e) {
    const auto dot = field.find('.');
    fail(origin, key_line(text, dot == std::string::npos ? field : field.substr(dot + 1)), field,
         e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace orbitlab::harness
