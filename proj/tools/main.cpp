// gsc: command-line front end. Subcommands: solve-hjb, gheat, riccati,
// simulate, adjoint, jets, verify, report. Exit codes: 0 success/PASS,
// 1 verification FAIL, 2 config error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "common.hpp"
#include "gsc/errors.hpp"
#include "gsc/hjb.hpp"
#include "gsc/jets.hpp"
#include "gsc/problem_io.hpp"
#include "gsc/riccati.hpp"
#include "gsc/version.hpp"

namespace gsctool {
namespace {

using namespace gsc;

FeedbackFn oracle_feedback(const ExampleProblem& ex) {
  return [fb = ex.oracle.feedback](double s, double x) { return fb(s, x); };
}

struct CommonFlags {
  int example = 0;
  std::string problem_file;
  double T = 0.0;  // 0 = per-example default
  double v = 1.25;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 1;
  std::string config_file;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_example = true) {
  cmd->add_option("--config", f.config_file, "read defaults from a `key = value` file");
  if (with_example) {
    cmd->add_option("--example", f.example, "built-in example (1, 2 or 3)");
    cmd->add_option("--problem", f.problem_file, "problem definition file");
  }
  cmd->add_option("--T", f.T, "horizon (default per example)");
  cmd->add_option("--v", f.v, "constant optimal control for example 3")->capture_default_str();
  cmd->add_option("--out", f.out, "output directory")->envname("GSC_OUT_DIR");
  cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
  cmd->add_option("--seed", f.seed, "base seed")->capture_default_str();
}

// Config file defaults: a flag given on the command line always wins over
// the file; the file wins over built-in defaults.
class FlagSource {
 public:
  FlagSource(const CLI::App* cmd, const std::string& config_file) : cmd_(cmd) {
    if (!config_file.empty()) file_ = KeyValues::parse_file(config_file);
    eff_.set("command", cmd->get_name());
  }

  void patch(const std::string& key, double& slot) {
    if (!cli_given(key) && file_.has(key)) slot = file_.get_num(key);
    eff_.set(key, format_double(slot));
  }
  void patch(const std::string& key, int& slot) {
    if (!cli_given(key) && file_.has(key)) slot = static_cast<int>(file_.get_int_or(key, slot));
    eff_.set(key, std::to_string(slot));
  }
  void patch(const std::string& key, std::uint64_t& slot) {
    if (!cli_given(key) && file_.has(key))
      slot = static_cast<std::uint64_t>(file_.get_int_or(key, static_cast<long>(slot)));
    eff_.set(key, std::to_string(slot));
  }
  void patch(const std::string& key, std::string& slot) {
    if (!cli_given(key) && file_.has(key)) slot = *file_.get(key);
    eff_.set(key, slot);
  }
  /// execution-environment knob: patched from the file but kept out of the
  /// effective-settings hash
  void patch_env(const std::string& key, std::string& slot) {
    if (!cli_given(key) && file_.has(key)) slot = *file_.get(key);
  }
  void patch_env(const std::string& key, int& slot) {
    if (!cli_given(key) && file_.has(key)) slot = static_cast<int>(file_.get_int_or(key, slot));
  }

  const KeyValues& effective() const { return eff_; }

 private:
  bool cli_given(const std::string& key) const { return cmd_->count("--" + key) > 0; }

  const CLI::App* cmd_;
  KeyValues file_;
  KeyValues eff_;
};

FlagSource patch_common(const CLI::App* cmd, CommonFlags& f, bool with_example = true) {
  FlagSource src(cmd, f.config_file);
  if (with_example) {
    src.patch("example", f.example);
    src.patch("problem", f.problem_file);
  }
  src.patch("T", f.T);
  src.patch("v", f.v);
  src.patch("seed", f.seed);
  src.patch_env("out", f.out);
  src.patch_env("threads", f.threads);
  return src;
}

// ---- solve-hjb -----------------------------------------------------------

struct SolveFlags {
  CommonFlags common;
  double x_lo = 0.0, x_hi = 0.0;  // 0/0 = per-example default
  int nx = 0;
  double t0 = 0.0;
  double safety = 0.9;
  int umesh = 65;
  std::string boundary = "auto";
  double rtol = 0.05;
};

int cmd_solve_hjb(const CLI::App* cmd, SolveFlags& f) {
  auto src = patch_common(cmd, f.common);
  src.patch("xlo", f.x_lo);
  src.patch("xhi", f.x_hi);
  src.patch("nx", f.nx);
  src.patch("t0", f.t0);
  src.patch("safety", f.safety);
  src.patch("umesh", f.umesh);
  src.patch("boundary", f.boundary);
  src.patch("rtol", f.rtol);
  const auto out_dir = resolve_out_dir(f.common.out);

  ControlProblem problem;
  TxFn oracle_value;
  if (!f.common.problem_file.empty()) {
    problem = load_problem_file(f.common.problem_file);
    if (f.common.T > 0.0) problem.horizon = f.common.T;
  } else if (f.common.example != 0) {
    const auto sel = load_example(f.common.example, f.common.T, f.common.v);
    problem = sel.ex.problem;
    oracle_value = sel.ex.oracle.value;
    const double def_lo[] = {0, -2.0, -1.5, -3.0}, def_hi[] = {0, 2.0, 1.5, 3.0};
    const int def_nx[] = {0, 401, 151, 1201};
    if (f.x_lo == 0.0 && f.x_hi == 0.0) {
      f.x_lo = def_lo[f.common.example];
      f.x_hi = def_hi[f.common.example];
    }
    if (f.nx == 0) f.nx = def_nx[f.common.example];
    if (f.common.example == 2 && f.t0 == 0.0)
      f.t0 = std::max(0.0, problem.horizon - 0.25);  // explicit scheme window
  } else {
    throw ConfigError("solve-hjb: need --example or --problem");
  }
  if (f.x_lo == 0.0 && f.x_hi == 0.0) {
    f.x_lo = -3.0;
    f.x_hi = 3.0;
  }
  if (f.nx == 0) f.nx = 601;

  BoundaryMode mode = BoundaryMode::LinearExtrapolation;
  if (f.boundary == "oracle" || (f.boundary == "auto" && oracle_value))
    mode = BoundaryMode::OracleDirichlet;
  else if (f.boundary != "extrap" && f.boundary != "auto")
    throw ConfigError("solve-hjb: --boundary must be oracle or extrap");
  if (mode == BoundaryMode::OracleDirichlet && !oracle_value)
    throw ConfigError("solve-hjb: oracle boundary needs a built-in example");

  Grid grid = make_grid(problem, f.x_lo, f.x_hi, f.nx, f.t0, f.safety, mode, f.umesh);
  HjbOptions opt;
  opt.u_mesh_n = f.umesh;
  opt.n_threads = f.common.threads;
  if (mode == BoundaryMode::OracleDirichlet) opt.boundary = oracle_value;

  const auto surface = hjb_solve(problem, grid, opt);

  std::ofstream csv(out_dir / "surface.csv", std::ios::binary);
  surface.write_csv(csv);

  const auto kinks = surface.detect_kinks();
  {
    std::ostringstream os;
    os << "t,x\n";
    for (const auto& [t, x] : kinks) os << format_double(t) << ',' << format_double(x) << '\n';
    write_text_file(out_dir / "kinks.csv", os.str());
  }

  // residual diagnostic, masking kink cells; a lower jump factor also
  // catches the weak end of a kink line
  ResidualOptions ropt;
  ropt.boundary_margin = 2;
  const auto mask_kinks = surface.detect_kinks(3.0);
  if (!mask_kinks.empty()) {
    auto shared = std::make_shared<std::vector<std::pair<double, double>>>(mask_kinks);
    const double dx = grid.dx(), dt = grid.dt();
    ropt.exclude = [shared, dx, dt](double t, double x) {
      for (const auto& [tk, xk] : *shared)
        if (std::abs(t - tk) <= 2.5 * dt && std::abs(x - xk) <= 2.5 * dx) return true;
      return false;
    };
  }
  const auto resid = hjb_residual(surface, problem, opt, ropt);

  json report;
  report["meta"] = meta_block(src.effective());
  report["problem"] = problem.name;
  report["grid"] = {{"x_lo", grid.x_lo}, {"x_hi", grid.x_hi}, {"nx", grid.nx},
                    {"t0", grid.t0},     {"T", grid.T},       {"nt", grid.nt}};
  report["residual"] = {{"max_abs", resid.max_abs},
                        {"mean_abs", resid.mean_abs},
                        {"max_rel", resid.max_rel()},
                        {"scale", resid.scale},
                        {"nodes", resid.nodes},
                        {"t_at_max", resid.t_at_max},
                        {"x_at_max", resid.x_at_max}};
  report["kinks_detected"] = kinks.size();
  report["tolerance"] = f.rtol;
  report["pass"] = resid.max_rel() <= f.rtol;
  write_json_file(out_dir / "residual.json", report);

  std::printf("solve-hjb: %s, grid %dx%d, V(t0,0) = %.6g, residual max %.3g "
              "(relative %.3g, tol %.3g)\n",
              problem.name.c_str(), grid.nt, grid.nx,
              surface.value(grid.t0, std::min(std::max(0.0, grid.x_lo), grid.x_hi)),
              resid.max_abs, resid.max_rel(), f.rtol);
  if (!kinks.empty())
    std::printf("solve-hjb: %zu kink nodes detected (see kinks.csv), first near x = %.4g at t = %.4g\n",
                kinks.size(), kinks.front().second, kinks.front().first);
  return resid.max_rel() <= f.rtol ? kExitOk : kExitVerifyFail;
}

// ---- gheat ---------------------------------------------------------------

struct GheatFlags {
  CommonFlags common;
  std::string phi = "xsq";
  double tau = 1.0;
  double lo_sq = 0.2, hi_sq = 1.0;
  double x_lo = -4.0, x_hi = 4.0;
  int nx = 801;
};

int cmd_gheat(const CLI::App* cmd, GheatFlags& f) {
  auto src = patch_common(cmd, f.common, false);
  src.patch("phi", f.phi);
  src.patch("tau", f.tau);
  src.patch("lo-sq", f.lo_sq);
  src.patch("hi-sq", f.hi_sq);
  src.patch("xlo", f.x_lo);
  src.patch("xhi", f.x_hi);
  src.patch("nx", f.nx);
  const auto out_dir = resolve_out_dir(f.common.out);
  Fn1 phi;
  TxFn exact;  // closed form where known
  if (f.phi == "xsq") {
    phi = [](double x) { return x * x; };
    exact = [hi = f.hi_sq](double tau, double x) { return x * x + hi * tau; };
  } else if (f.phi == "negxsq") {
    phi = [](double x) { return -x * x; };
    exact = [lo = f.lo_sq](double tau, double x) { return -x * x - lo * tau; };
  } else if (f.phi == "abs") {
    phi = [](double x) { return std::abs(x); };
  } else if (f.phi == "linear") {
    phi = [](double x) { return x; };
    exact = [](double, double x) { return x; };
  } else {
    throw ConfigError("gheat: --phi must be xsq, negxsq, abs or linear");
  }

  const VolBounds bounds{f.lo_sq, f.hi_sq};
  const auto result = gheat_solve(phi, f.tau, bounds, f.x_lo, f.x_hi, f.nx, 0.9,
                                  f.common.threads);

  std::ostringstream os;
  os << "x,u\n";
  for (int i = 0; i < result.grid.nx; ++i)
    os << format_double(result.grid.x(i)) << ','
       << format_double(result.u[static_cast<std::size_t>(i)]) << '\n';
  write_text_file(out_dir / "gheat.csv", os.str());

  json report;
  report["meta"] = meta_block(src.effective());
  report["phi"] = f.phi;
  report["tau"] = f.tau;
  report["u_at_0"] = result.at(0.0);
  if (exact) report["closed_form_deviation_at_0"] = std::abs(result.at(0.0) - exact(f.tau, 0.0));
  write_json_file(out_dir / "gheat.json", report);

  std::printf("gheat: phi = %s, u(%.4g, 0) = %.6g", f.phi.c_str(), f.tau, result.at(0.0));
  if (exact) std::printf("  (closed form %.6g)", exact(f.tau, 0.0));
  std::printf("\n");
  return kExitOk;
}

// ---- riccati ---------------------------------------------------------------

int cmd_riccati(const CLI::App* cmd, CommonFlags& common, double dt, double tol) {
  auto src = patch_common(cmd, common, false);
  src.patch("dt", dt);
  src.patch("tol", tol);
  const auto out_dir = resolve_out_dir(common.out);
  const double T = common.T > 0.0 ? common.T : 1.0;
  const auto table = riccati_solve(T, dt);

  double worst = 0.0;
  std::ostringstream os;
  os << "s,P,P_closed_form\n";
  for (std::size_t j = 0; j < table.p.size(); ++j) {
    const double s = static_cast<double>(j) * table.dt;
    const double exact = riccati_closed_form(s, T);
    worst = std::max(worst, std::abs(table.p[j] - exact));
    os << format_double(s) << ',' << format_double(table.p[j]) << ',' << format_double(exact)
       << '\n';
  }
  write_text_file(out_dir / "riccati.csv", os.str());

  json report;
  report["meta"] = meta_block(src.effective());
  report["T"] = T;
  report["dt"] = table.dt;
  report["max_closed_form_deviation"] = worst;
  report["P_at_0"] = table.p.front();
  report["tolerance"] = tol;
  report["pass"] = worst <= tol;
  write_json_file(out_dir / "riccati.json", report);

  std::printf("riccati: T = %g, dt = %g, P(0) = %.8g, max closed-form deviation %.3g\n", T,
              table.dt, table.p.front(), worst);
  return worst <= tol ? kExitOk : kExitVerifyFail;
}

// ---- simulate --------------------------------------------------------------

struct SimulateFlags {
  CommonFlags common;
  std::string scenario = "constant:1.0";
  double t0 = 0.0, x0 = 0.0;
  int paths = 100, steps = 1000;
  int dump_paths = 4;
  std::string rule = "left";
};

int cmd_simulate(const CLI::App* cmd, SimulateFlags& f) {
  auto src = patch_common(cmd, f.common);
  src.patch("scenario", f.scenario);
  src.patch("t0", f.t0);
  src.patch("x0", f.x0);
  src.patch("paths", f.paths);
  src.patch("steps", f.steps);
  src.patch("dump-paths", f.dump_paths);
  src.patch("rule", f.rule);
  if (f.common.example == 0) throw ConfigError("simulate: need --example");
  const auto out_dir = resolve_out_dir(f.common.out);
  const auto sel = load_example(f.common.example, f.common.T, f.common.v);
  const auto& ex = sel.ex;
  const auto view = view_of(ex.oracle);
  const auto scenario = parse_scenario(f.scenario, f.t0, sel.T);
  const QuadratureRule rule =
      f.rule == "trap" ? QuadratureRule::Trapezoid : QuadratureRule::LeftEndpoint;

  SimulateOptions opt;
  opt.n_threads = f.common.threads;
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), scenario, f.t0, f.x0, f.steps,
                                 f.paths, f.common.seed, opt);
  bsde_candidates(bundle, view, ex.problem);
  ktilde_accumulate(bundle, view, ex.problem, rule);
  if (ex.problem.k_integrand) k_accumulate(bundle, ex.problem, rule);
  const auto rep = relation_report(bundle, view, ex.problem);

  for (int j = 0; j < std::min(f.dump_paths, bundle.n_paths); ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "path_%03d.csv", j);
    std::ofstream csv(out_dir / name, std::ios::binary);
    write_path_csv(bundle, j, csv);
  }

  const auto last = static_cast<std::size_t>(bundle.n_steps);
  double k_min = 0.0, k_max = 0.0, kt_min = 0.0, kt_max = 0.0;
  std::vector<double> k_T(static_cast<std::size_t>(bundle.n_paths));
  std::vector<double> kt_T(static_cast<std::size_t>(bundle.n_paths));
  for (int j = 0; j < bundle.n_paths; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    kt_T[jj] = bundle.Ktilde(jj, last);
    k_T[jj] = bundle.K.empty() ? 0.0 : bundle.K(jj, last);
  }
  k_min = *std::min_element(k_T.begin(), k_T.end());
  k_max = *std::max_element(k_T.begin(), k_T.end());
  kt_min = *std::min_element(kt_T.begin(), kt_T.end());
  kt_max = *std::max_element(kt_T.begin(), kt_T.end());

  json report;
  report["meta"] = meta_block(src.effective());
  report["example"] = f.common.example;
  report["scenario"] = scenario.describe();
  report["n_paths"] = bundle.n_paths;
  report["n_steps"] = bundle.n_steps;
  report["seed"] = f.common.seed;
  report["K_T"] = {{"mean", mean(k_T)}, {"min", k_min}, {"max", k_max},
                   {"available", !bundle.K.empty()}};
  report["Ktilde_T"] = {{"mean", mean(kt_T)}, {"min", kt_min}, {"max", kt_max}};
  report["residuals"] = {{"max_y", rep.max_y_resid},
                         {"mean_y", rep.mean_y_resid},
                         {"max_hjb", rep.max_hjb_resid},
                         {"max_min", rep.max_min_resid}};
  write_json_file(out_dir / "simulate_summary.json", report);

  std::printf("simulate: example %d under %s, %d paths x %d steps, K_T in [%.4g, %.4g], "
              "Ktilde_T in [%.4g, %.4g]\n",
              f.common.example, scenario.describe().c_str(), bundle.n_paths, bundle.n_steps,
              k_min, k_max, kt_min, kt_max);
  return kExitOk;
}

// ---- adjoint ---------------------------------------------------------------

struct AdjointFlags {
  CommonFlags common;
  std::string scenario = "constant:1.0";
  double t = 0.0, x = 0.0;
  int paths = 10000, steps = 4096;
};

int cmd_adjoint(const CLI::App* cmd, AdjointFlags& f) {
  auto src = patch_common(cmd, f.common);
  src.patch("scenario", f.scenario);
  src.patch("t", f.t);
  src.patch("x", f.x);
  src.patch("paths", f.paths);
  src.patch("steps", f.steps);
  if (f.common.example == 0) throw ConfigError("adjoint: need --example");
  const auto out_dir = resolve_out_dir(f.common.out);
  const auto sel = load_example(f.common.example, f.common.T, f.common.v);
  const auto& ex = sel.ex;
  const auto view = view_of(ex.oracle);
  const auto scenario = parse_scenario(f.scenario, f.t, sel.T);

  SimulateOptions opt;
  opt.n_threads = f.common.threads;
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), scenario, f.t, f.x,
                                 f.steps, std::min(f.paths, 64), f.common.seed, opt);
  bsde_candidates(bundle, view, ex.problem);
  const auto adj = adjoint_feedback(view, ex.problem, bundle);
  const auto mc = adjoint_p_mc(ex.problem, scenario, oracle_feedback(ex), f.t, f.x, f.paths,
                               f.steps, f.common.seed, &view, opt);
  const auto cons = adjoint_consistency(adj, mc, 1e-3);

  json report;
  report["meta"] = meta_block(src.effective());
  report["example"] = f.common.example;
  report["scenario"] = scenario.describe();
  report["p_feedback"] = adj.p_t;
  report["p_mc"] = mc.value;
  report["stderr"] = mc.stderr_;
  report["discrepancy"] = cons.discrepancy;
  report["tolerance"] = cons.tol;
  report["adjoint_residual_max"] = adj.adjoint_residual_max;
  report["pass"] = cons.pass;
  write_json_file(out_dir / "adjoint.json", report);

  std::printf("adjoint: example %d at (%g, %g) under %s: p_feedback = %.6g, p_mc = %.6g "
              "(se %.3g), %s\n",
              f.common.example, f.t, f.x, scenario.describe().c_str(), adj.p_t, mc.value,
              mc.stderr_, cons.pass ? "consistent" : "INCONSISTENT");
  return cons.pass ? kExitOk : kExitVerifyFail;
}

// ---- jets ------------------------------------------------------------------

struct JetsFlags {
  CommonFlags common;
  double tstar = 0.0;
  double x = std::nan("");
  int steps = 1000;
  int paths = 500;
};

int cmd_jets(const CLI::App* cmd, JetsFlags& f) {
  auto src = patch_common(cmd, f.common);
  src.patch("tstar", f.tstar);
  src.patch("steps", f.steps);
  src.patch("paths", f.paths);
  if (cmd->count("--x") > 0 || std::isnan(f.x)) src.patch("x", f.x);
  if (f.common.example == 0) throw ConfigError("jets: need --example");
  const auto out_dir = resolve_out_dir(f.common.out);
  const auto sel = load_example(f.common.example, f.common.T, f.common.v);
  const auto& ex = sel.ex;
  const auto view = view_of(ex.oracle);
  const double T = sel.T;

  double t = f.tstar;
  double x = f.x;
  std::vector<ScenarioMeasure> candidates;
  ScenarioMeasure reference = ex.oracle.reference;
  switch (f.common.example) {
    case 1:
      if (std::isnan(x)) x = -0.6 * (T - t);
      candidates = {ScenarioMeasure::constant(ex.problem.bounds.sigma_hi_sq),
                    ScenarioMeasure::constant(ex.problem.bounds.sigma_lo_sq)};
      break;
    case 2:
      if (std::isnan(x)) x = 1.0;
      candidates = {ScenarioMeasure::constant(1.0)};
      break;
    case 3:
      t = (f.tstar != 0.0) ? f.tstar : T - 1.0;
      if (std::isnan(x)) x = 0.0;
      candidates = {ScenarioMeasure::constant(1.0 / sel.v),
                    ScenarioMeasure::piecewise({0.6, 1.0}, {t + 0.5 * (T - t)})};
      break;
    default:
      throw ConfigError("jets: example must be 1, 2 or 3");
  }

  const auto d = one_sided_dx(ex.oracle.value, t, x);
  const auto jets = jet_intervals(d.d_minus, d.d_plus);

  PBoundsOptions popt;
  popt.n_steps = f.steps;
  popt.n_paths = ex.problem.sigma_is_zero ? 2 : f.paths;
  popt.seed = f.common.seed;
  popt.membership_tol = f.common.example == 2 ? 1e-9 : 1e-6;
  popt.n_threads = f.common.threads;
  const auto pb = p_bounds(ex.problem, candidates, oracle_feedback(ex), t, x, popt);

  SimulateOptions opt;
  opt.n_threads = f.common.threads;
  auto bundle = simulate_forward(ex.problem, oracle_feedback(ex), reference, t, x, f.steps,
                                 2, f.common.seed, opt);
  bsde_candidates(bundle, view, ex.problem);
  const bool mask_kinks = f.common.example == 1;
  const auto adj = adjoint_feedback(view, ex.problem, bundle,
                                    mask_kinks ? [T](double s, double xx) {
                                      return std::abs(xx + 0.6 * (T - s)) < 1e-9;
                                    } : std::function<bool(double, double)>{});
  const auto mc = adjoint_p_mc(ex.problem, reference, oracle_feedback(ex), t, x,
                               std::max(2, popt.n_paths), f.steps, f.common.seed, &view, opt);
  const auto mp = mp_check(ex.problem, bundle, adj, ex.problem.control_set.mesh(65));

  const double ctol = 1e-9 + 3.0 * mc.stderr_;
  const bool containment = !jets.sub.has_value() ||
                           (jets.sub->lo >= pb.p_tilde - ctol && jets.sub->hi <= pb.p_bar + ctol);

  json report;
  report["meta"] = meta_block(src.effective());
  report["example"] = f.common.example;
  report["point"] = {{"t", t}, {"x", x}};
  report["p_feedback"] = adj.p_t;
  report["p_mc"] = mc.value;
  report["stderr"] = mc.stderr_;
  report["mp_min"] = mp.min_inner;
  report["d_minus"] = d.d_minus;
  report["d_plus"] = d.d_plus;
  report["D1_minus"] =
      jets.sub ? json::array({jets.sub->lo, jets.sub->hi}) : json::array();
  report["D1_plus"] =
      jets.super ? json::array({jets.super->lo, jets.super->hi}) : json::array();
  report["p_tilde"] = pb.p_tilde;
  report["p_bar"] = pb.p_bar;
  report["containment"] = containment;
  report["pass"] = containment;
  json cand = json::array();
  for (const auto& c : pb.candidates)
    cand.push_back({{"scenario", c.scenario}, {"K_T", c.k_T}, {"member", c.member},
                    {"p", c.p.value}});
  report["candidates"] = cand;
  write_json_file(out_dir / "jets.json", report);

  std::printf("jets: example %d at (%g, %g): one-sided (%.6g, %.6g), bounds [%.6g, %.6g], "
              "super-jet %s, containment %s\n",
              f.common.example, t, x, d.d_minus, d.d_plus, pb.p_tilde, pb.p_bar,
              jets.super ? "nonempty" : "empty", containment ? "PASS" : "FAIL");
  return containment ? kExitOk : kExitVerifyFail;
}

// ---- report ----------------------------------------------------------------

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("report: not a directory: " + dir);
  int total = 0, failed = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    json j;
    try {
      in >> j;
    } catch (const json::exception&) {
      std::printf("[SKIP] %s: not valid JSON\n", entry.path().filename().string().c_str());
      continue;
    }
    if (!j.contains("pass")) {
      std::printf("[INFO] %s\n", entry.path().filename().string().c_str());
      continue;
    }
    const bool pass = j["pass"].get<bool>();
    ++total;
    if (!pass) ++failed;
    std::printf("[%s] %s\n", pass ? "PASS" : "FAIL",
                entry.path().filename().string().c_str());
  }
  std::printf("report: %d checked, %d failed\n", total, failed);
  return failed == 0 ? kExitOk : kExitVerifyFail;
}

}  // namespace
}  // namespace gsctool

int main(int argc, char** argv) {
  using namespace gsctool;
  CLI::App app{"numerics for stochastic control under volatility uncertainty"};
  app.set_version_flag("--version", gsc::kVersion);
  app.require_subcommand(1);

  SolveFlags solve;
  auto* c_solve = app.add_subcommand("solve-hjb", "solve the dynamic programming equation");
  add_common(c_solve, solve.common);
  c_solve->add_option("--xlo", solve.x_lo, "left edge of the spatial box");
  c_solve->add_option("--xhi", solve.x_hi, "right edge of the spatial box");
  c_solve->add_option("--nx", solve.nx, "spatial nodes");
  c_solve->add_option("--t0", solve.t0, "initial time")->capture_default_str();
  c_solve->add_option("--safety", solve.safety, "CFL safety factor")->capture_default_str();
  c_solve->add_option("--umesh", solve.umesh, "control mesh points")->capture_default_str();
  c_solve->add_option("--boundary", solve.boundary, "oracle | extrap | auto")
      ->capture_default_str();
  c_solve->add_option("--rtol", solve.rtol, "residual tolerance for the exit code")
      ->capture_default_str();

  GheatFlags gheat;
  auto* c_gheat = app.add_subcommand("gheat", "solve the nonlinear heat equation");
  add_common(c_gheat, gheat.common, false);
  c_gheat->add_option("--phi", gheat.phi, "payoff: xsq | negxsq | abs | linear")
      ->capture_default_str();
  c_gheat->add_option("--tau", gheat.tau, "evolution time")->capture_default_str();
  c_gheat->add_option("--lo-sq", gheat.lo_sq, "lower variance bound")->capture_default_str();
  c_gheat->add_option("--hi-sq", gheat.hi_sq, "upper variance bound")->capture_default_str();
  c_gheat->add_option("--xlo", gheat.x_lo)->capture_default_str();
  c_gheat->add_option("--xhi", gheat.x_hi)->capture_default_str();
  c_gheat->add_option("--nx", gheat.nx)->capture_default_str();

  CommonFlags riccati_common;
  double riccati_dt = 1e-4, riccati_tol = 1e-8;
  auto* c_riccati = app.add_subcommand("riccati", "backward Riccati table vs closed form");
  add_common(c_riccati, riccati_common, false);
  c_riccati->add_option("--dt", riccati_dt, "step size")->capture_default_str();
  c_riccati->add_option("--tol", riccati_tol, "deviation tolerance")->capture_default_str();

  SimulateFlags sim;
  auto* c_sim = app.add_subcommand("simulate", "forward paths with martingale diagnostics");
  add_common(c_sim, sim.common);
  c_sim->add_option("--scenario", sim.scenario, "constant:<g> or piecewise:<g1,g2,...>")
      ->capture_default_str();
  c_sim->add_option("--t0", sim.t0, "start time")->capture_default_str();
  c_sim->add_option("--x0", sim.x0, "start state")->capture_default_str();
  c_sim->add_option("--paths", sim.paths)->capture_default_str();
  c_sim->add_option("--steps", sim.steps)->capture_default_str();
  c_sim->add_option("--dump-paths", sim.dump_paths, "paths written as CSV")
      ->capture_default_str();
  c_sim->add_option("--rule", sim.rule, "quadrature: left | trap")->capture_default_str();

  AdjointFlags adjf;
  auto* c_adj = app.add_subcommand("adjoint", "adjoint value: feedback vs Monte Carlo");
  add_common(c_adj, adjf.common);
  c_adj->add_option("--scenario", adjf.scenario)->capture_default_str();
  c_adj->add_option("--t", adjf.t)->capture_default_str();
  c_adj->add_option("--x", adjf.x)->capture_default_str();
  c_adj->add_option("--paths", adjf.paths)->capture_default_str();
  c_adj->add_option("--steps", adjf.steps)->capture_default_str();

  JetsFlags jets;
  auto* c_jets = app.add_subcommand("jets", "one-sided derivatives and adjoint bounds");
  add_common(c_jets, jets.common);
  c_jets->add_option("--tstar", jets.tstar, "evaluation time")->capture_default_str();
  c_jets->add_option("--x", jets.x, "evaluation state (default per example)");
  c_jets->add_option("--steps", jets.steps)->capture_default_str();
  c_jets->add_option("--paths", jets.paths)->capture_default_str();

  CommonFlags verify_common;
  std::string verify_scenario;
  double verify_tstar = 0.0;
  auto* c_verify = app.add_subcommand("verify", "full relation suite for one example");
  add_common(c_verify, verify_common);
  c_verify->add_option("--scenario", verify_scenario, "extra scenario to classify (example 3)");
  c_verify->add_option("--point", verify_tstar, "evaluation time t* (example 1)")
      ->capture_default_str();

  std::string report_dir = "gsc_out";
  auto* c_report = app.add_subcommand("report", "aggregate PASS/FAIL over emitted JSON reports");
  c_report->add_option("--dir", report_dir, "directory of JSON reports")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (c_solve->parsed()) return cmd_solve_hjb(c_solve, solve);
    if (c_gheat->parsed()) return cmd_gheat(c_gheat, gheat);
    if (c_riccati->parsed()) return cmd_riccati(c_riccati, riccati_common, riccati_dt, riccati_tol);
    if (c_sim->parsed()) return cmd_simulate(c_sim, sim);
    if (c_adj->parsed()) return cmd_adjoint(c_adj, adjf);
    if (c_jets->parsed()) return cmd_jets(c_jets, jets);
    if (c_verify->parsed()) {
      auto src = patch_common(c_verify, verify_common);
      src.patch("scenario", verify_scenario);
      src.patch("point", verify_tstar);
      const double t_default = verify_common.example == 3 ? 2.0 : 1.0;
      const auto sel = load_example(verify_common.example == 0 ? 1 : verify_common.example,
                                    verify_common.T > 0.0 ? verify_common.T : t_default,
                                    verify_common.v);
      return run_verify(sel, verify_scenario, verify_tstar, verify_common.seed,
                        verify_common.threads, resolve_out_dir(verify_common.out),
                        src.effective());
    }
    if (c_report->parsed()) return cmd_report(report_dir);
  } catch (const gsc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const gsc::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const gsc::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumericalError;
  }
  return kExitOk;
}
