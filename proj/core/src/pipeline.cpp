#include "orbitlab/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "orbitlab/errors.hpp"
#include "orbitlab/expansion.hpp"
#include "orbitlab/io.hpp"
#include "orbitlab/orbit.hpp"
#include "orbitlab/reduction.hpp"
#include "orbitlab/slope.hpp"

namespace orbitlab::harness {

namespace fs = std::filesystem;
using geometry::Scenario;
using geometry::Shape;
using loops::Loop;
using std::numbers::pi;
using namespace tol;

int RunResult::exit_code() const {
  for (const auto& c : claims)
    if (c.status == Status::fail) return 1;
  return 0;
}

Loop reference_geodesic(const Scenario& s, const std::vector<int>& cls, int N) {
  const auto& sp = s.spec();
  switch (sp.shape) {
    case Shape::circle: {
      const int k = cls.empty() ? 1 : cls[0];
      if (k == 0) throw std::invalid_argument("circle class must be nonzero");
      return loops::circle_cover(N, k, sp.radius);
    }
    case Shape::sphere: {
      Vec a = Vec::Zero(3), b = Vec::Zero(3);
      a[0] = sp.radius;
      b[1] = sp.radius;
      return loops::project(s, loops::great_circle(N, a, b).X);
    }
    case Shape::torus: {
      if (cls.size() != 2) throw std::invalid_argument("torus class needs (p, q)");
      const int p = cls[0], q = cls[1];
      if (p == 0 && q == 0) throw std::invalid_argument("torus class must be nontrivial");
      if (q == 0) return loops::torus_loop(N, p, 0, sp.major, sp.minor, pi);  // inner equator
      if (p == 0) return loops::torus_loop(N, 0, q, sp.major, sp.minor);      // meridian
      const Loop seed = loops::torus_loop(N, p, q, sp.major, sp.minor);
      return loops::find_geodesic(s, seed, cls).loop;
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

struct Ctx {
  const RunConfig& cfg;
  fs::path dir;
  std::string tag;  // comment line prefix
  RunResult result;
  std::ostream* log;

  std::string path(const std::string& name) {
    result.files.push_back(name);
    return (dir / name).string();
  }
  void note(const std::string& msg) {
    if (log) *log << msg << "\n";
  }
};

std::string two_digits(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

ClaimReport make_claim(int criterion) {
  ClaimReport r;
  r.criterion = criterion;
  r.id = claim_ids()[criterion - 1];
  r.anchor = "pipeline run";
  return r;
}

expansion::FTOptions ft_options(const RunConfig& cfg) {
  expansion::FTOptions fo;
  fo.allow_symmetric_kernel = cfg.symmetric_kernel;
  return fo;
}

std::vector<double> or_default(const std::vector<double>& v, const std::string& spec) {
  return v.empty() ? parse_grid(spec) : v;
}

void run_geodesic(Ctx& c, const Scenario& s) {
  const Loop ref = reference_geodesic(s, c.cfg.geodesic_class, c.cfg.N);
  const Loop seed = loops::perturbed_loop(s, ref, c.cfg.seed, 0.1 * s.tube_radius(), 3);
  loops::DescentOptions opt;
  opt.scheme = c.cfg.scheme;
  const auto g = loops::find_geodesic(s, seed, loops::winding(s, ref), opt);
  write_loop_csv(c.path("geodesic.csv"), g.loop, c.tag);
  const auto spec = loops::jacobi_spectrum(s, g.loop, c.cfg.scheme);
  CsvWriter w(c.path("geodesic_report.csv"), c.tag,
              {"iterations", "grad_norm", "energy", "reference_energy", "kernel_dim", "nondegenerate"});
  w.cell(g.iterations).cell(g.grad_norm).cell(loops::energy(g.loop)).cell(loops::energy(ref))
      .cell(spec.kernel_dim).cell(spec.nondegenerate ? 1 : 0);
  w.end_row();
}

void write_bundle(Ctx& c, const expansion::ExpansionBundle& b) {
  const int n = b.x0.dim();
  std::vector<std::string> cols = {"t"};
  for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i + 1));
  cols.push_back("a");
  for (int i = 0; i < n; ++i) cols.push_back("fT" + std::to_string(i + 1));
  cols.push_back("gn");
  CsvWriter w(c.path("bundle.csv"), c.tag, cols);
  const Vec t = spectral::grid(b.x0.N());
  for (int j = 0; j < b.x0.N(); ++j) {
    w.cell(t[j]);
    for (int i = 0; i < n; ++i) w.cell(b.x0.X(j, i));
    w.cell(b.a[j]);
    for (int i = 0; i < n; ++i) w.cell(b.fT(j, i));
    w.cell(b.gn[j]);
    w.end_row();
  }
}

void run_expand(Ctx& c, const Scenario& s) {
  const auto b = expansion::build_bundle(
      s, reference_geodesic(s, c.cfg.geodesic_class, c.cfg.N), ft_options(c.cfg));
  write_bundle(c, b);
  const auto eps = or_default(c.cfg.eps, "1e-4:1e-2:logx8");
  CsvWriter w(c.path("residual.csv"), c.tag, {"eps", "dual", "l2", "sup", "order0", "order1"});
  std::vector<double> E, R;
  for (double e : eps) {
    try {
      const auto r = expansion::residual(s, expansion::assemble(s, b, e, 2), e, &b);
      w.cell(e).cell(r.dual).cell(r.l2).cell(r.sup).cell(r.order0).cell(r.order1);
      w.end_row();
      E.push_back(e);
      R.push_back(r.dual);
    } catch (const TubeExit& ex) {
      c.note("eps " + fmt(e) + " skipped: " + ex.what());
    }
  }
  if (E.size() >= 4) {
    auto cl = make_claim(2);
    const auto f = fit_slope(E, R);
    cl.measured = f.slope;
    cl.tolerance = kC2SlopeHi - 2.0;
    cl.status = slope_status(f.slope >= kC2SlopeLo && f.slope <= kC2SlopeHi, f.r2);
    cl.detail = "r2=" + fmt(f.r2) + " condition=" + fmt(b.condition);
    c.result.claims.push_back(cl);
  }
}

void run_solve(Ctx& c, const Scenario& s) {
  const auto b = expansion::build_bundle(
      s, reference_geodesic(s, c.cfg.geodesic_class, c.cfg.N), ft_options(c.cfg));
  const auto eps = or_default(c.cfg.eps, "1e-4:1e-3:logx8");
  CsvWriter w(c.path("solve.csv"), c.tag,
              {"eps", "y_sup", "yT_sup", "yn_sup", "newton_iters", "condition", "residual_sup",
               "energy_drift"});
  std::vector<double> E, Y, Yn;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double e = eps[i];
    const auto r = orbit::correct_from_bundle(s, b, e);
    const double drift = orbit::first_integral_drift(s, r.solution, e);
    w.cell(e).cell(r.y_sup).cell(r.yT_sup).cell(r.yn_sup).cell(r.newton_iters).cell(r.condition)
        .cell(r.residual_sup).cell(drift);
    w.end_row();
    write_loop_csv(c.path("orbit_" + two_digits(static_cast<int>(i)) + ".csv"), r.solution,
                   c.tag + " eps=" + format_double(e));
    E.push_back(e);
    Y.push_back(r.y_sup);
    Yn.push_back(r.yn_sup);
  }
  if (E.size() >= 4) {
    auto cl = make_claim(3);
    const auto f = fit_slope(E, Y), fn = fit_slope(E, Yn);
    cl.measured = f.slope;
    cl.tolerance = kC3Slope;
    cl.status = merge(slope_status(f.slope >= kC3Slope, f.r2),
                      slope_status(fn.slope > kC3NormalSlope, fn.r2));
    cl.detail = "r2=" + fmt(f.r2) + " normal slope=" + fmt(fn.slope);
    c.result.claims.push_back(cl);
  }
}

void write_sweep(Ctx& c, const orbit::SweepReport& rep) {
  CsvWriter w(c.path("sweep.csv"), c.tag,
              {"T", "eps", "dist_C0", "dist_C1", "corr_sup", "corr_normal_sup", "newton_iters",
               "cond_est", "slope_C0_running", "energy", "energy_drift", "status"});
  for (const auto& r : rep.rows) {
    w.cell(r.T).cell(r.eps).cell(r.dist_C0).cell(r.dist_C1).cell(r.corr_sup)
        .cell(r.corr_normal_sup).cell(r.newton_iters).cell(r.cond_est).cell(r.slope_C0_running)
        .cell(r.energy).cell(r.energy_drift).cell(r.status);
    w.end_row();
  }
}

void run_sweep(Ctx& c, const Scenario& s) {
  const auto b = expansion::build_bundle(
      s, reference_geodesic(s, c.cfg.geodesic_class, c.cfg.N), ft_options(c.cfg));
  orbit::SweepReport rep;
  int criterion = 4;
  if (c.cfg.mode == periodic_ode::Mode::attractive) {
    criterion = 9;
    std::vector<int> ks;
    for (int k = c.cfg.k_min; k <= c.cfg.k_max; ++k) ks.push_back(k);
    const double A = c.cfg.energy_cap > 0 ? c.cfg.energy_cap : 2 * loops::energy(b.x0) + 1;
    rep = orbit::attractive_sweep(s, b, ks, A);
  } else {
    std::vector<double> T = c.cfg.T.empty() ? parse_grid("1e2:1e6:logx8") : c.cfg.T;
    rep = orbit::adiabatic_sweep(s, b, T);
  }
  write_sweep(c, rep);
  const int usable = static_cast<int>(rep.rows.size()) - rep.skipped;
  if (usable < 4) {
    auto cl = make_claim(criterion);
    cl.tolerance = kC4SlopeTol;
    cl.status = Status::inconclusive;
    cl.detail = std::to_string(usable) + " usable rows, " + std::to_string(rep.skipped) +
                " skipped; need 4 for a slope";
    c.result.claims.push_back(cl);
  } else {
    auto cl = make_claim(criterion);
    cl.measured = rep.slope_C0;
    cl.tolerance = kC4SlopeTol;
    cl.status = merge(slope_status(std::abs(rep.slope_C0 - kC4Slope) <= kC4SlopeTol, rep.r2_C0),
                      rep.C1_decreasing ? Status::pass : Status::fail);
    cl.detail = "r2=" + fmt(rep.r2_C0) + " C1_decreasing=" + (rep.C1_decreasing ? "yes" : "no") +
                " skipped=" + std::to_string(rep.skipped);
    c.result.claims.push_back(cl);
  }
}

void run_reduce(Ctx& c, const Scenario& s) {
  const Loop ref = reference_geodesic(s, c.cfg.geodesic_class, c.cfg.N);
  const double alpha0 = loops::energy(ref);
  const auto cls = loops::winding(s, ref);
  const Loop seed = loops::perturbed_loop(s, ref, c.cfg.seed, 0.2 * s.tube_radius(), 2);
  const auto eps = or_default(c.cfg.eps, "1e-2,1e-3,1e-4");
  CsvWriter w(c.path("reduction.csv"), c.tag,
              {"eps", "v_sup", "C_A", "G_eps", "G_closed", "L_eps", "L0", "grad_norm",
               "L0_grad_norm", "iterations", "rel_err"});
  std::vector<double> err;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto m = reduction::minimize_reduced(s, seed, cls, eps[i], c.cfg.mode);
    const auto en = reduction::reduced_energy(s, m.state);
    const double rel = std::abs(m.value - alpha0) / alpha0;
    w.cell(eps[i]).cell(m.state.v_sup).cell(m.state.C_A).cell(en.G_direct).cell(en.G_closed)
        .cell(en.L_eps).cell(en.L0).cell(m.grad_norm).cell(m.L0_grad_norm).cell(m.iterations)
        .cell(rel);
    w.end_row();
    write_loop_csv(c.path("minimizer_" + two_digits(static_cast<int>(i)) + ".csv"), m.h,
                   c.tag + " eps=" + format_double(eps[i]));
    err.push_back(rel);
  }
  if (err.size() >= 2) {
    auto cl = make_claim(8);
    bool decreasing = true;
    for (std::size_t i = 1; i < err.size(); ++i) decreasing = decreasing && err[i] < err[i - 1];
    cl.measured = err.back();
    cl.tolerance = kC8Rel;
    cl.status = decreasing && err.back() <= kC8Rel ? Status::pass : Status::fail;
    cl.detail = "alpha0=" + fmt(alpha0) + (decreasing ? " decreasing" : " not decreasing");
    c.result.claims.push_back(cl);
  }
}

void run_green_audit(Ctx& c) {
  std::vector<double> lambdas = c.cfg.lambda;
  if (lambdas.empty()) {
    if (c.cfg.mode == periodic_ode::Mode::repulsive) {
      lambdas = parse_grid("-1e2:-1e4:logx4");
    } else {
      for (int k = c.cfg.k_min; k <= std::min(c.cfg.k_max, 50); ++k) lambdas.push_back((k + 0.5) * (k + 0.5));
    }
  }
  const auto rows = periodic_ode::estimate_audit(c.cfg.mode, lambdas, c.cfg.trials, c.cfg.seed,
                                                 c.cfg.N, kC5Delta);
  CsvWriter w(c.path("green_audit.csv"), c.tag,
              {"lambda", "mode", "bound", "exact", "asymptotic", "observed", "margin", "ok"});
  int bad = 0;
  double worst = -1.0;
  for (const auto& r : rows) {
    w.cell(r.lambda_2pi).cell(periodic_ode::mode_name(r.mode)).cell(r.bound).cell(r.exact)
        .cell(r.asymptotic).cell(r.observed).cell(r.margin).cell(r.ok ? 1 : 0);
    w.end_row();
    bad += !r.ok;
    worst = std::max(worst, r.observed / r.asymptotic - 1.0);
  }
  auto cl = make_claim(5);
  cl.measured = worst;
  cl.tolerance = kC5Delta;
  cl.status = bad == 0 ? Status::pass : Status::fail;
  cl.detail = std::to_string(rows.size()) + " rows, " + std::to_string(bad) + " violations";
  c.result.claims.push_back(cl);
}

void run_claim_suite(Ctx& c) {
  std::vector<int> which = c.cfg.claims;
  if (which.empty())
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  ClaimOptions o;
  o.N = c.cfg.N;
  o.seed = c.cfg.seed;
  for (int k : which) {
    c.result.claims.push_back(run_claim(k, o));
    const auto& r = c.result.claims.back();
    c.note("claim " + std::to_string(r.criterion) + " " + r.id + ": " + status_name(r.status) +
           " (" + fmt(r.runtime) + " s) " + r.detail);
  }
}

}  // namespace

RunResult run(const RunConfig& cfg, std::ostream* log) {
  Ctx c{cfg, fs::path(cfg.out_dir), "orbitlab " + cfg.command + " scenario=" + cfg.scenario_name, {},
        log};
  fs::create_directories(c.dir);
  const Scenario s = cfg.make_scenario();
  const std::string& cmd = cfg.command;
  if (cmd == "geodesic") run_geodesic(c, s);
  else if (cmd == "expand") run_expand(c, s);
  else if (cmd == "solve") run_solve(c, s);
  else if (cmd == "sweep") run_sweep(c, s);
  else if (cmd == "reduce") run_reduce(c, s);
  else if (cmd == "green-audit") run_green_audit(c);
  else if (cmd == "claims") run_claim_suite(c);
  else throw ConfigError("unknown command '" + cmd + "'");

  if (!c.result.claims.empty()) {
    CsvWriter w(c.path("claims.csv"), c.tag,
                {"criterion", "id", "status", "measured", "tolerance", "detail"});
    for (const auto& r : c.result.claims) {
      w.cell(r.criterion).cell(r.id).cell(status_name(r.status)).cell(r.measured)
          .cell(r.tolerance).cell(r.detail);
      w.end_row();
    }
  }
  CsvWriter m((c.dir / "manifest.csv").string(), c.tag, {"kind", "name", "status"});
  for (const auto& f : c.result.files) {
    m.cell(std::string("file")).cell(f).cell(std::string(""));
    m.end_row();
  }
  for (const auto& r : c.result.claims) {
    m.cell(std::string("claim")).cell(r.id).cell(status_name(r.status));
    m.end_row();
  }
  return c.result;
}

}  // namespace orbitlab::harness
