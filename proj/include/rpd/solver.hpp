#pragma once

#include <cstdint>
#include <vector>

#include "rpd/problems.hpp"
#include "rpd/rng.hpp"
#include "rpd/schedules.hpp"
#include "rpd/vec.hpp"

namespace rpd {

struct TraceOptions {
  // Record a snapshot every `stride` iterations (0 disables periodic
  // snapshots; the endpoints needed by the perturbation certificate are
  // always kept).
  int stride = 0;
  bool record_draws = true;
  // Keep full iterates and running averages at snapshot points.
  bool record_iterates = false;
};

struct RunTrace {
  std::uint64_t seed = 0;
  double gamma_sum = 0.0;
  double wall_seconds = 0.0;

  // Endpoints, always retained: z^1, x^{N-1}, z^N.
  Vector x_first, y_first;
  Vector x_second_last;
  Vector x_last, y_last;

  std::vector<int> draws;  // i_t for t = 1..N-1

  // Periodic snapshots, labeled by iterate index (t+1 after step t).
  std::vector<int> snapshot_t;
  std::vector<double> dist_to_opt;  // ||x^t - x*||, when z* is known
  std::vector<Vector> snapshot_x, snapshot_y;
  std::vector<Vector> snapshot_avg_x, snapshot_avg_y;
};

struct SolverResult {
  Vector x_hat, y_hat;  // weighted-average output
  RunTrace trace;
};

// Canonical deterministic start point x^1 (box midpoint, simplex uniform,
// free origin).
Vector default_start(const SaddleInstance& inst);

// The dual start y^1 used by run(): the instance's designated start when
// present, otherwise the exact per-block maximizer.
Vector resolve_initial_dual(const SaddleInstance& inst, const Vector& x1);

// Mutable state of one solver run. The iteration counter t is 1-based: a
// freshly initialized state has t = 1 and rpd_step(t) produces the iterate
// z^{t+1}.
struct SolverState {
  int t = 1;
  Vector x_prev, x_cur, x_bar, y_cur;
  KahanVectorSum sum_x{0}, sum_y{0};  // gamma-weighted running sums
  KahanSum weight_total;
  RngStream rng{0};
  bool use_instance_dgfs = false;
  int last_drawn = 0;  // block index of the most recent step

  Vector average_x() const;
  Vector average_y() const;
};

// x^1 = x^0 = the canonical start, y^1 as in resolve_initial_dual (entropy
// blocks start at the DGF center under use_instance_dgfs), x_bar^1 = x^1.
SolverState make_initial_state(const SaddleInstance& inst, std::uint64_t seed,
                               bool use_instance_dgfs = false);

// One iteration: draw i_t, dual prox on block i_t only (the other blocks
// are untouched), primal prox against A^T y^{t+1}, extrapolation, and
// gamma-weighted accumulation. Advances state.t.
void rpd_step(const SaddleInstance& inst, const Schedule& sched,
              SolverState& state);

// Randomized primal-dual run with Euclidean prox terms. Executes exactly
// N-1 steps of: draw block i_t; dual prox on block i_t at the extrapolated
// point; primal prox; extrapolation update; weighted averaging.
SolverResult run(const SaddleInstance& inst, const Schedule& sched,
                 std::uint64_t seed, const TraceOptions& opts = {});

// Same iteration with the instance's distance generating functions. With
// all-Euclidean DGFs this is the identical code path, so iterates match
// run() bit for bit. Entropy blocks start from the DGF center (uniform)
// to keep every iterate interior.
SolverResult run_bregman(const SaddleInstance& inst, const Schedule& sched,
                         std::uint64_t seed, const TraceOptions& opts = {});

}  // namespace rpd
