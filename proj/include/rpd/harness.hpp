#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpd/admm.hpp"
#include "rpd/problems.hpp"
#include "rpd/quality.hpp"
#include "rpd/schedules.hpp"
#include "rpd/solver.hpp"

namespace rpd {

inline constexpr const char* kLibraryVersion = "0.1.0";

// One experiment: an instance, a regime, an N grid, and R seeds
// (seed_base, seed_base + 1, ..., seed_base + R - 1).
struct ExperimentConfig {
  std::string instance_json;
  Regime regime = Regime::general_bounded;
  bool bregman = false;
  std::vector<int> n_list;
  int seeds = 50;
  std::uint64_t seed_base = 1;
  int stride = 0;
  std::string out_dir;
  // Tolerance overrides.
  double norm_rel_tol = 1e-10;
};

ExperimentConfig config_from_json_text(const std::string& text);

// Number of concurrent seed runs: RPD_THREADS when set, otherwise the
// available parallelism. Results are always aggregated in seed order.
int worker_count();

// Seed-averaged estimate of the regime's observable optimality gap at one N,
// against the closed-form rate bound.
struct GapStats {
  int N = 0;
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation
  double std_err = 0.0;   // stddev / sqrt(R)
  double bound = 0.0;
  // Unbounded regime extras.
  double mean_v_norm = 0.0;
  double v_norm_bound = 0.0;
  std::vector<double> per_seed;
};

std::vector<GapStats> estimate_expected_gap(const SaddleInstance& inst,
                                            const ExperimentConfig& config);

// Ordinary least squares fit of ln(gap) against ln(N).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  std::vector<std::string> warnings;  // dropped nonpositive points
};

RateFit rate_fit(const std::vector<std::pair<double, double>>& n_gap_points);

// Seed-mean distance to the solution at each checkpoint of the randomized
// constrained solver on the pattern counterexample.
struct Table1Row {
  int p = 0;
  std::vector<double> mean_dist;  // one per checkpoint
};

struct Table1 {
  std::vector<int> checkpoints;
  std::vector<Table1Row> rows;
};

Table1 run_table1(const std::vector<int>& p_list,
                  const std::vector<int>& checkpoints, int seeds,
                  std::uint64_t seed_base = 1);

// CSV and manifest output ----------------------------------------------------

std::string csv_escape(const std::string& field);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string gap_stats_csv_text(const std::vector<GapStats>& stats);
std::string table1_csv_text(const Table1& table);

std::uint64_t fnv1a_hash(const std::string& text);

// {"config_hash": ..., "library_version": ..., "wall_time_s": ...,
//  "outputs": [...]}
void write_manifest(const std::string& path, const std::string& config_text,
                    double wall_time_s,
                    const std::vector<std::string>& outputs);

// Trace CSV: rows (t, i_t, dist_to_opt, gap_checkpoint) at stride points.
// The gap column is the exact sup-gap of the running average when the
// instance is bounded and iterates were recorded, empty otherwise.
std::string trace_csv_text(const SaddleInstance& inst, const RunTrace& trace);

}  // namespace rpd
