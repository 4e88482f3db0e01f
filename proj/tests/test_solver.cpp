#include "doctest.h"

#include <cmath>
#include <fstream>

#include "oracles.hpp"
#include "rpd/errors.hpp"
#include "rpd/harness.hpp"
#include "rpd/problems.hpp"
#include "rpd/quality.hpp"
#include "rpd/rng.hpp"
#include "rpd/solver.hpp"

using namespace rpd;

#ifndef RPD_TEST_DIR
#define RPD_TEST_DIR "."
#endif

TEST_CASE("draw_block: p=1 always returns 1 and still advances the stream") {
  RngStream a(123), b(123);
  CHECK(a.draw_block(1) == 1);
  b.next_u64();
  CHECK(a.state() == b.state());
}

TEST_CASE("draw_block matches the recorded golden sequence") {
  std::ifstream golden(std::string(RPD_TEST_DIR) + "/golden/rng_seed42_p3.txt");
  REQUIRE(golden.good());
  RngStream rng(42);
  int expected;
  int count = 0;
  while (golden >> expected) {
    CHECK(rng.draw_block(3) == expected);
    ++count;
  }
  CHECK(count == 16);
}

TEST_CASE("draw_block is empirically uniform at p=7") {
  RngStream rng(7);
  int counts[8] = {0};
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) counts[rng.draw_block(7)]++;
  for (int b = 1; b <= 7; ++b) {
    const double freq = static_cast<double>(counts[b]) / draws;
    CHECK(std::abs(freq * 7.0 - 1.0) <= 0.01);
  }
}

namespace {

SaddleInstance identity_game(int size, int p) {
  return build_matrix_game(BlockLinearOperator::identity(size), p);
}

}  // namespace

TEST_CASE("p=1 run matches the deterministic primal-dual reference") {
  const auto game = identity_game(2, 1);
  const int n_budget = 201;  // 200 steps
  const Schedule sched =
      general_bounded_schedule(1, 1.0, std::sqrt(2.0), std::sqrt(2.0), n_budget);

  TraceOptions opts;
  opts.stride = 1;
  opts.record_iterates = true;
  const SolverResult ours = run(game, sched, 5, opts);

  const Vector x1 = default_start(game);
  const Vector y1 = resolve_initial_dual(game, x1);
  const auto ref = oracle::deterministic_primal_dual(
      game, sched.tau_, sched.eta_, sched.q_, sched.gamma_, x1, y1);

  CHECK(vec::dist2(ours.x_hat, ref.x_hat) <= 1e-12);
  CHECK(vec::dist2(ours.y_hat, ref.y_hat) <= 1e-12);
  REQUIRE(ours.trace.snapshot_x.size() == 200);
  for (std::size_t k = 0; k < ours.trace.snapshot_x.size(); ++k) {
    const int t = ours.trace.snapshot_t[k];  // iterate index, 2..N
    CHECK(vec::dist2(ours.trace.snapshot_x[k], ref.x_iterates[t - 1]) <= 1e-12);
    CHECK(vec::dist2(ours.trace.snapshot_y[k], ref.y_iterates[t - 1]) <= 1e-12);
  }
}

TEST_CASE("single rpd_step: reference agreement, bounds on t") {
  const auto game = identity_game(2, 1);
  const Schedule sched =
      general_bounded_schedule(1, 1.0, std::sqrt(2.0), std::sqrt(2.0), 5);
  SolverState state = make_initial_state(game, 17);
  const Vector x1 = state.x_cur;
  const Vector y1 = state.y_cur;
  rpd_step(game, sched, state);
  CHECK(state.t == 2);
  CHECK(state.last_drawn == 1);
  CHECK(state.x_prev == x1);

  const auto ref = oracle::deterministic_primal_dual(
      game, {sched.tau(1)}, {sched.eta(1)}, {sched.q(1)}, {sched.gamma(1)}, x1,
      y1);
  CHECK(vec::dist2(state.x_cur, ref.x_iterates[1]) <= 1e-14);
  CHECK(vec::dist2(state.y_cur, ref.y_iterates[1]) <= 1e-14);
  CHECK(vec::dist2(state.average_x(), ref.x_hat) <= 1e-14);

  for (int t = 2; t <= sched.steps(); ++t) rpd_step(game, sched, state);
  CHECK_THROWS_AS(rpd_step(game, sched, state), Error);  // past the budget
}

TEST_CASE("zero operator: nothing moves and the average is the start") {
  const auto zero_op = BlockLinearOperator(2, {1, 1}, {0.0, 0.0, 0.0, 0.0});
  SaddleInstance inst{zero_op,
                      SeparableFunction::zero(2),
                      FeasibleSet::simplex(2),
                      {SeparableFunction::zero(1), SeparableFunction::zero(1)},
                      {FeasibleSet::box({0.0}, {1.0}), FeasibleSet::box({0.0}, {1.0})},
                      DistanceGenerating::euclidean(),
                      {DistanceGenerating::euclidean(),
                       DistanceGenerating::euclidean()},
                      std::nullopt,
                      std::nullopt,
                      "zero"};
  const Schedule sched = general_bounded_schedule(2, 1.0, 1.0, 1.0, 50);
  const SolverResult res = run(inst, sched, 3);
  CHECK(res.x_hat == res.trace.x_first);
  CHECK(res.y_hat == res.trace.y_first);
  CHECK(res.trace.x_last == res.trace.x_first);
}

TEST_CASE("block-locality: only the drawn block changes, bit for bit") {
  const auto game = identity_game(6, 3);
  const Schedule sched =
      general_bounded_schedule(3, 1.0, std::sqrt(2.0), std::sqrt(6.0), 40);
  TraceOptions opts;
  opts.stride = 1;
  opts.record_iterates = true;
  const SolverResult res = run(game, sched, 11, opts);
  REQUIRE(res.trace.draws.size() == 39);
  Vector prev_y = res.trace.y_first;
  for (std::size_t k = 0; k < res.trace.snapshot_y.size(); ++k) {
    const int drawn = res.trace.draws[k];
    const Vector& cur_y = res.trace.snapshot_y[k];
    for (int i = 1; i <= 3; ++i) {
      if (i == drawn) continue;
      const auto before = game.block(prev_y, i);
      const auto after = game.block(cur_y, i);
      for (int j = 0; j < game.A.block_dim(i); ++j) CHECK(before[j] == after[j]);
    }
    prev_y = cur_y;
  }
}

TEST_CASE("determinism: same seed gives bit-identical runs") {
  const auto game = identity_game(4, 2);
  const Schedule sched =
      general_bounded_schedule(2, 1.0, std::sqrt(2.0), 2.0, 100);
  const SolverResult a = run(game, sched, 42);
  const SolverResult b = run(game, sched, 42);
  CHECK(a.x_hat == b.x_hat);
  CHECK(a.y_hat == b.y_hat);
  CHECK(a.trace.draws == b.trace.draws);
  const SolverResult c = run(game, sched, 43);
  CHECK(a.trace.draws != c.trace.draws);
}

TEST_CASE("N=2 collapses the average to the single produced iterate") {
  const auto game = identity_game(2, 1);
  const Schedule sched =
      general_bounded_schedule(1, 1.0, std::sqrt(2.0), std::sqrt(2.0), 2);
  const SolverResult res = run(game, sched, 9);
  CHECK(res.x_hat == res.trace.x_last);
  CHECK(res.y_hat == res.trace.y_last);
  CHECK(res.trace.x_second_last == res.trace.x_first);
}

TEST_CASE("averaging matches a post-hoc recomputation from the trace") {
  const Schedule sched = smooth_schedule(2, 1.0, 60);  // varying gammas
  const auto toy = build_regularized_loss_toy(
      BlockLinearOperator::identity(4).with_blocks(2), true);
  TraceOptions opts;
  opts.stride = 1;
  opts.record_iterates = true;
  const SolverResult res = run(toy, sched, 21, opts);
  Vector sx(res.x_hat.size(), 0.0), sy(res.y_hat.size(), 0.0);
  double wsum = 0.0;
  for (std::size_t k = 0; k < res.trace.snapshot_x.size(); ++k) {
    const int t = res.trace.snapshot_t[k] - 1;  // weight index gamma_t
    const double g = sched.gamma(t);
    vec::axpy(g, res.trace.snapshot_x[k], sx);
    vec::axpy(g, res.trace.snapshot_y[k], sy);
    wsum += g;
  }
  for (double& v : sx) v /= wsum;
  for (double& v : sy) v /= wsum;
  const double scale = 1.0 + vec::norm2(res.x_hat);
  CHECK(vec::dist2(sx, res.x_hat) <= 1e-13 * scale);
  CHECK(vec::dist2(sy, res.y_hat) <= 1e-13 * (1.0 + vec::norm2(res.y_hat)));
}

TEST_CASE("feasibility holds at every snapshot") {
  const auto game = identity_game(6, 3);
  const Schedule sched =
      general_bounded_schedule(3, 1.0, std::sqrt(2.0), std::sqrt(6.0), 80);
  TraceOptions opts;
  opts.stride = 1;
  opts.record_iterates = true;
  const SolverResult res = run(game, sched, 2, opts);
  for (const auto& x : res.trace.snapshot_x) CHECK(game.X.contains(x, 1e-9));
  for (const auto& y : res.trace.snapshot_y)
    for (int i = 1; i <= 3; ++i)
      CHECK(game.Y[i - 1].contains(
          Vector(game.block(y, i).begin(), game.block(y, i).end()), 1e-9));
}

TEST_CASE("smooth schedule refuses instances without the modulus") {
  const auto game = identity_game(2, 1);  // J = 0
  const Schedule sched = smooth_schedule(1, 1.0, 10);
  CHECK_THROWS_WITH_AS(run(game, sched, 1), doctest::Contains("rescale"),
                       RegimeError);
}

TEST_CASE("bregman run with euclidean DGFs is bit-identical to run()") {
  const auto toy = build_regularized_loss_toy(
      BlockLinearOperator::identity(4).with_blocks(2), true);
  const Schedule sched = smooth_schedule(2, 1.0, 50);
  const SolverResult a = run(toy, sched, 77);
  const SolverResult b = run_bregman(toy, sched, 77);
  CHECK(a.x_hat == b.x_hat);
  CHECK(a.y_hat == b.y_hat);
  CHECK(a.trace.x_last == b.trace.x_last);
  CHECK(a.trace.y_last == b.trace.y_last);
}

TEST_CASE("entropy run keeps every dual iterate strictly positive") {
  // A tilted payoff keeps the uniform start away from the equilibrium, so
  // the multiplicative updates genuinely move.
  auto game = build_matrix_game(
      BlockLinearOperator::dense(4, 3,
                                 {1.0, -0.4, 0.2, -0.3, 0.8, -0.1, 0.5, 0.1,
                                  -0.7, -0.2, 0.3, 0.9}),
      2);
  for (auto& d : game.dgf_y) d = DistanceGenerating::entropy();
  const double dx = game.bregman_diameter_x();
  const double dy = game.bregman_diameter_y();
  const Schedule sched = general_bounded_schedule(
      2, 1.0, std::sqrt(2.0 * dx), std::sqrt(2.0 * dy), 60);
  TraceOptions opts;
  opts.stride = 1;
  opts.record_iterates = true;
  const SolverResult res = run_bregman(game, sched, 13, opts);
  for (const auto& y : res.trace.snapshot_y)
    for (double v : y) CHECK(v > 0.0);
  // And the output gap sits under the Bregman bound target.
  const double g0 = sup_gap_g0(game, res.x_hat, res.y_hat);
  CHECK(g0 <= bregman_gap_bound(sched, dx, dy));
}

TEST_CASE("degenerate one-point dual blocks still run") {
  // 2x2 identity split into two one-row blocks: each Y_i is the point {1}.
  const auto game = identity_game(2, 2);
  Schedule sched;
  sched.regime = Regime::general_bounded;
  sched.N = 30;
  sched.tau_.assign(29, 1.0);
  sched.eta_.assign(29, 2.0);
  sched.q_.assign(29, 2.0);
  sched.gamma_.assign(29, 0.5);
  sched.gamma_[28] = 1.0;
  const SolverResult res = run(game, sched, 4);
  CHECK(res.y_hat == Vector{1.0, 1.0});
  CHECK(game.X.contains(res.x_hat, 1e-9));
}

TEST_CASE("trace CSV has the stated columns at stride points") {
  const auto game = identity_game(2, 1);
  const Schedule sched =
      general_bounded_schedule(1, 1.0, std::sqrt(2.0), std::sqrt(2.0), 21);
  TraceOptions opts;
  opts.stride = 5;
  opts.record_iterates = true;
  const SolverResult res = run(game, sched, 1, opts);
  const std::string csv = trace_csv_text(game, res.trace);
  CHECK(csv.rfind("t,i_t,dist_to_opt,gap_checkpoint", 0) == 0);
  // stride hits t = 5,10,15,20 plus the final step.
  CHECK(res.trace.snapshot_t.size() == 4);
}
