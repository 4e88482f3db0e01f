// Experiment CLI for the randomized primal-dual library: single solves,
// schedule validation, rate studies, constrained-solver demos, the
// equivalence suite, and the counterexample table.
//
// Exit codes: 0 success, 2 validation failure, 3 threshold failure under
// --check.

#include <chrono>
#include <cmath>
#include <iomanip>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpd/admm.hpp"
#include "rpd/errors.hpp"
#include "rpd/harness.hpp"
#include "rpd/problems.hpp"
#include "rpd/quality.hpp"
#include "rpd/schedules.hpp"
#include "rpd/solver.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitThreshold = 3;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_base = 1;
  int seeds = 50;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw rpd::ConfigError("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void ensure_out_dir(const GlobalOpts& g) {
  if (!g.out_dir.empty() && g.out_dir != ".")
    std::filesystem::create_directories(g.out_dir);
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  return (std::filesystem::path(g.out_dir) / name).string();
}

void note(const GlobalOpts& g, const std::string& line) {
  if (!g.quiet) std::cout << line << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw rpd::Error("cannot open " + path + " for writing");
  os << text;
}

rpd::Schedule build_schedule(const rpd::SaddleInstance& inst,
                             rpd::Regime regime, bool bregman, double norm_a,
                             int n_budget) {
  using namespace rpd;
  switch (regime) {
    case Regime::general_bounded:
      if (bregman)
        return general_bounded_schedule(
            inst.p(), norm_a, std::sqrt(2.0 * inst.bregman_diameter_x()),
            std::sqrt(2.0 * inst.bregman_diameter_y()), n_budget);
      return general_bounded_schedule(inst.p(), norm_a, inst.omega_x(),
                                      inst.omega_y(), n_budget);
    case Regime::smooth:
      return smooth_schedule(inst.p(), norm_a, n_budget);
    case Regime::unbounded:
      return unbounded_schedule(inst.p(), norm_a, n_budget);
  }
  throw rpd::Error("unknown regime");
}

int cmd_solve(const GlobalOpts& g, int stride, std::uint64_t seed,
              bool bregman) {
  using namespace rpd;
  const auto t0 = std::chrono::steady_clock::now();
  if (g.config_path.empty())
    throw rpd::ConfigError("solve needs --config PATH");
  const std::string config_text = read_file(g.config_path);
  ExperimentConfig cfg = config_from_json_text(config_text);
  const SaddleInstance inst = instance_from_json_text(cfg.instance_json);
  const int n_budget = cfg.n_list.front();
  double norm_a = spectral_norm(inst.A);
  if (norm_a == 0.0) norm_a = 1.0;
  const Schedule sched =
      build_schedule(inst, cfg.regime, bregman || cfg.bregman, norm_a, n_budget);

  TraceOptions topts;
  topts.stride = stride > 0 ? stride
                 : cfg.stride > 0 ? cfg.stride
                                  : std::max(1, n_budget / 50);
  topts.record_iterates = true;
  const SolverResult result = (bregman || cfg.bregman)
                                  ? run_bregman(inst, sched, seed, topts)
                                  : run(inst, sched, seed, topts);

  double bound = 0.0;
  switch (cfg.regime) {
    case Regime::general_bounded:
      bound = (bregman || cfg.bregman)
                  ? bregman_gap_bound(sched, inst.bregman_diameter_x(),
                                      inst.bregman_diameter_y())
                  : bound_general(inst.p(), norm_a, inst.omega_x(),
                                  inst.omega_y(), n_budget);
      break;
    case Regime::smooth:
      bound = bound_smooth(inst.p(), norm_a, inst.omega_x(), inst.omega_y(),
                           n_budget);
      break;
    case Regime::unbounded:
      bound = bound_unbounded(inst.p(), norm_a, distance_D(inst, sched),
                              n_budget).gap;
      break;
  }
  const GapReport report = make_gap_report(inst, sched, result, bound);

  ensure_out_dir(g);
  const std::string trace_path = out_path(g, "trace.csv");
  write_text(trace_path, trace_csv_text(inst, result.trace));

  nlohmann::json summary = nlohmann::json::parse(report.to_json_text());
  summary["x_hat"] = result.x_hat;
  summary["y_hat"] = result.y_hat;
  summary["wall_seconds"] = result.trace.wall_seconds;
  const std::string summary_path = out_path(g, "summary.json");
  write_text(summary_path, summary.dump(2) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_path(g, "manifest.json"), config_text, wall,
                 {trace_path, summary_path});
  note(g, "wrote " + trace_path + ", " + summary_path);
  if (report.g0) note(g, "g0 = " + std::to_string(*report.g0) +
                             " (bound " + std::to_string(bound) + ")");
  if (report.perturbed_gap)
    note(g, "perturbed gap at z* = " + std::to_string(*report.perturbed_gap) +
                " (bound " + std::to_string(bound) + ")");
  return 0;
}

int cmd_validate_schedule(const std::string& regime_name_s, int p,
                          double norm_a, double omega_x, double omega_y,
                          int n_budget, bool check) {
  using namespace rpd;
  const Regime regime = regime_from_name(regime_name_s);
  Schedule sched;
  switch (regime) {
    case Regime::general_bounded:
      sched = general_bounded_schedule(p, norm_a, omega_x, omega_y, n_budget);
      break;
    case Regime::smooth:
      sched = smooth_schedule(p, norm_a, n_budget);
      break;
    case Regime::unbounded:
      sched = unbounded_schedule(p, norm_a, n_budget);
      break;
  }
  const ValidationReport report = validate(sched, p, norm_a);
  std::cout << report.to_text();
  if (check && !report.pass()) return kExitThreshold;
  return 0;
}

int cmd_rate_study(const GlobalOpts& g, bool check, double max_slope,
                   double min_r2) {
  using namespace rpd;
  const auto t0 = std::chrono::steady_clock::now();
  if (g.config_path.empty())
    throw rpd::ConfigError("rate-study needs --config PATH");
  const std::string config_text = read_file(g.config_path);
  ExperimentConfig cfg = config_from_json_text(config_text);
  cfg.seeds = g.seeds;
  cfg.seed_base = g.seed_base;
  const SaddleInstance inst = instance_from_json_text(cfg.instance_json);
  const auto stats = estimate_expected_gap(inst, cfg);

  std::vector<std::pair<double, double>> points;
  bool under_bound = true;
  for (const auto& s : stats) {
    points.emplace_back(static_cast<double>(s.N), s.mean);
    if (s.mean + s.std_err > s.bound) under_bound = false;
    note(g, "N=" + std::to_string(s.N) + " mean=" + std::to_string(s.mean) +
                " +/-" + std::to_string(s.std_err) +
                " bound=" + std::to_string(s.bound));
  }

  ensure_out_dir(g);
  const std::string gaps_path = out_path(g, "gaps.csv");
  write_text(gaps_path, gap_stats_csv_text(stats));

  nlohmann::json fit_json;
  bool slope_ok = true;
  if (points.size() >= 3) {
    const RateFit fit = rate_fit(points);
    fit_json = {{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"points_used", fit.points_used},
                {"warnings", fit.warnings}};
    note(g, "log-log slope = " + std::to_string(fit.slope) +
                ", R^2 = " + std::to_string(fit.r_squared));
    slope_ok = fit.slope <= max_slope && fit.r_squared >= min_r2;
  }
  const std::string fit_path = out_path(g, "rate.json");
  write_text(fit_path, fit_json.dump(2) + "\n");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_path(g, "manifest.json"), config_text, wall,
                 {gaps_path, fit_path});
  if (check && (!under_bound || !slope_ok)) return kExitThreshold;
  return 0;
}

int cmd_admm_demo(const GlobalOpts& g, int p, double rho, int iters,
                  const std::string& method, std::uint64_t seed) {
  using namespace rpd;
  const auto t0 = std::chrono::steady_clock::now();
  const LcpInstance lcp = counterexample_lcp(p);
  std::vector<int> checkpoints;
  for (int c = 100; c <= iters; c *= 10) checkpoints.push_back(c);
  if (checkpoints.empty() || checkpoints.back() != iters)
    checkpoints.push_back(iters);

  AdmmOptions opts;
  opts.x0.assign(p, 1.0);
  opts.y0.assign(p, 0.0);
  opts.checkpoints = checkpoints;

  AdmmTrace trace;
  if (method == "vanilla") {
    trace = vanilla_admm_run(lcp, rho, iters, opts);
  } else if (method == "proximal") {
    trace = proximal_admm_run(lcp, rho, Vector(iters, 1.0), iters, opts);
  } else {
    const Schedule sched = unbounded_schedule(p, lcp.coupling_norm(), iters);
    trace = method == "randomized"
                ? randomized_proximal_admm_run(lcp, sched, seed, opts)
                : rpd_lcp_run(lcp, sched, seed, opts);
  }

  ensure_out_dir(g);
  std::ostringstream csv;
  csv << "checkpoint,dist_to_solution\r\n";
  for (std::size_t k = 0; k < trace.checkpoint_t.size(); ++k)
    csv << trace.checkpoint_t[k] << ',' << trace.dist_at_checkpoint[k] << "\r\n";
  const std::string path = out_path(g, "admm_demo.csv");
  write_text(path, csv.str());
  std::ostringstream cfg;
  cfg << "admm-demo p=" << p << " rho=" << rho << " iters=" << iters
      << " method=" << method << " seed=" << seed;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_path(g, "manifest.json"), cfg.str(), wall, {path});
  note(g, "wrote " + path);
  for (std::size_t k = 0; k < trace.checkpoint_t.size(); ++k)
    note(g, "t=" + std::to_string(trace.checkpoint_t[k]) + "  ||x - x*|| = " +
                std::to_string(trace.dist_at_checkpoint[k]));
  return 0;
}

int cmd_equivalence(const GlobalOpts& g, int instances, int iters, double tol,
                    bool check) {
  using namespace rpd;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const std::vector<int> dims =
        k % 2 == 0 ? std::vector<int>{1, 1, 1} : std::vector<int>{1, 2, 1, 1};
    const LcpInstance lcp =
        random_lcp_instance(1000 + static_cast<std::uint64_t>(k), 3, dims);
    const Schedule sched =
        unbounded_schedule(lcp.p(), lcp.coupling_norm(), iters);
    for (int s = 0; s < g.seeds; ++s) {
      const std::uint64_t seed = g.seed_base + static_cast<std::uint64_t>(s);
      AdmmOptions opts;
      opts.record_iterates = true;
      const AdmmTrace a = rpd_lcp_run(lcp, sched, seed, opts);
      const AdmmTrace b = randomized_proximal_admm_run(lcp, sched, seed, opts);
      for (std::size_t t = 0; t < a.x_history.size(); ++t) {
        for (std::size_t i = 0; i < a.x_history[t].size(); ++i)
          worst = std::max(worst,
                           std::abs(a.x_history[t][i] - b.x_history[t][i]));
        for (std::size_t i = 0; i < a.y_history[t].size(); ++i)
          worst = std::max(worst,
                           std::abs(a.y_history[t][i] - b.y_history[t][i]));
      }
    }
  }
  {
    std::ostringstream line;
    line << "max componentwise deviation = " << std::scientific
         << std::setprecision(3) << worst;
    note(g, line.str());
  }
  ensure_out_dir(g);
  nlohmann::json j{{"instances", instances},
                   {"seeds", g.seeds},
                   {"iters", iters},
                   {"max_deviation", worst},
                   {"tolerance", tol}};
  write_text(out_path(g, "equivalence.json"), j.dump(2) + "\n");
  if (check && worst > tol) return kExitThreshold;
  return 0;
}

int cmd_table1(const GlobalOpts& g, std::vector<int> p_list,
               std::vector<int> checkpoints) {
  using namespace rpd;
  const auto t0 = std::chrono::steady_clock::now();
  const Table1 table = run_table1(p_list, checkpoints, g.seeds, g.seed_base);
  ensure_out_dir(g);
  const std::string path = out_path(g, "table1.csv");
  write_text(path, table1_csv_text(table));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream cfg;
  cfg << "table1 p=";
  for (int p : p_list) cfg << p << ' ';
  write_manifest(out_path(g, "manifest.json"), cfg.str(), wall, {path});
  note(g, "wrote " + path);
  std::cout << table1_csv_text(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized primal-dual saddle point solver"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "experiment config JSON")
      ->envname("RPD_CONFIG");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed-base", g.seed_base, "first seed");
  app.add_option("--seeds", g.seeds, "number of seeds");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  auto* solve = app.add_subcommand("solve", "run one seeded solve");
  int stride = 0;
  std::uint64_t seed = 1;
  bool bregman = false;
  solve->add_option("--stride", stride, "trace snapshot stride");
  solve->add_option("--seed", seed, "seed for this solve");
  solve->add_flag("--bregman", bregman, "use the instance's DGFs");

  auto* vs = app.add_subcommand("validate-schedule",
                                "print the per-condition schedule report");
  std::string regime = "general";
  int p = 1, n_budget = 100;
  double norm_a = 1.0, omega_x = 1.0, omega_y = 1.0;
  bool vs_check = false;
  vs->add_option("--regime", regime, "general|smooth|unbounded");
  vs->add_option("--p", p, "block count");
  vs->add_option("--norm-a", norm_a, "operator norm");
  vs->add_option("--omega-x", omega_x, "primal diameter (general)");
  vs->add_option("--omega-y", omega_y, "dual diameter (general)");
  vs->add_option("--iters", n_budget, "iteration budget N");
  vs->add_flag("--check", vs_check, "exit 3 on violations");

  auto* rs = app.add_subcommand("rate-study",
                                "seed-averaged gaps against the rate bound");
  bool rs_check = false;
  double max_slope = 0.0, min_r2 = 0.0;
  rs->add_flag("--check", rs_check, "exit 3 if bound or slope targets fail");
  rs->add_option("--max-slope", max_slope, "slope threshold under --check");
  rs->add_option("--min-r2", min_r2, "R^2 threshold under --check");

  auto* ad = app.add_subcommand("admm-demo",
                                "constrained solvers on the counterexample");
  int ad_p = 3, ad_iters = 10000;
  double rho = 1.0;
  std::string method = "vanilla";
  std::uint64_t ad_seed = 1;
  ad->add_option("--p", ad_p, "block count (>= 2)");
  ad->add_option("--rho", rho, "penalty parameter");
  ad->add_option("--iters", ad_iters, "iterations");
  ad->add_option("--method", method, "vanilla|proximal|randomized|rpd")
      ->check(CLI::IsMember({"vanilla", "proximal", "randomized", "rpd"}));
  ad->add_option("--seed", ad_seed, "seed for randomized methods");

  auto* eq = app.add_subcommand("equivalence",
                                "primal-dual vs randomized proximal ADMM");
  int eq_instances = 10, eq_iters = 1000;
  double eq_tol = 1e-10;
  bool eq_check = false;
  eq->add_option("--instances", eq_instances, "random instances");
  eq->add_option("--iters", eq_iters, "iterations per run");
  eq->add_option("--tol", eq_tol, "max deviation under --check");
  eq->add_flag("--check", eq_check, "exit 3 if the deviation exceeds --tol");

  auto* t1 = app.add_subcommand("table1", "counterexample checkpoint table");
  std::vector<int> p_list{10, 20, 50};
  std::vector<int> checkpoints{100, 1000, 10000, 100000};
  t1->add_option("--p-list", p_list, "block counts");
  t1->add_option("--checkpoints", checkpoints, "ascending iterate indices");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(g, stride, seed, bregman);
    if (vs->parsed())
      return cmd_validate_schedule(regime, p, norm_a, omega_x, omega_y,
                                   n_budget, vs_check);
    if (rs->parsed()) return cmd_rate_study(g, rs_check, max_slope, min_r2);
    if (ad->parsed()) return cmd_admm_demo(g, ad_p, rho, ad_iters, method, ad_seed);
    if (eq->parsed())
      return cmd_equivalence(g, eq_instances, eq_iters, eq_tol, eq_check);
    if (t1->parsed()) return cmd_table1(g, p_list, checkpoints);
  } catch (const rpd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const rpd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
