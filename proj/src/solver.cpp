#include "rpd/solver.hpp"

#include <cassert>
#include <chrono>
#include <cmath>

#include "rpd/errors.hpp"
#include "rpd/rng.hpp"

namespace rpd {

Vector default_start(const SaddleInstance& inst) {
  return inst.X.canonical_start();
}

Vector resolve_initial_dual(const SaddleInstance& inst, const Vector& x1) {
  if (inst.start_dual) {
    Vector y = *inst.start_dual;
    if (y.size() != static_cast<std::size_t>(inst.dual_dim()))
      throw DimensionError("start_dual", inst.dual_dim(), y.size());
    return y;
  }
  return initial_dual(inst, x1);
}

namespace {

const DistanceGenerating kEuclidean = DistanceGenerating::euclidean();

const DistanceGenerating& dual_dgf(const SaddleInstance& inst, int i,
                                   bool use_instance_dgfs) {
  return use_instance_dgfs ? inst.dgf_y[i - 1] : kEuclidean;
}

}  // namespace

Vector SolverState::average_x() const {
  return vec::scaled(sum_x.value(), 1.0 / weight_total.value());
}

Vector SolverState::average_y() const {
  return vec::scaled(sum_y.value(), 1.0 / weight_total.value());
}

SolverState make_initial_state(const SaddleInstance& inst, std::uint64_t seed,
                               bool use_instance_dgfs) {
  SolverState state;
  state.use_instance_dgfs = use_instance_dgfs;
  state.rng = RngStream(seed);
  state.x_cur = default_start(inst);
  state.x_prev = state.x_cur;
  state.x_bar = state.x_cur;

  if (inst.start_dual) {
    state.y_cur = *inst.start_dual;
    if (state.y_cur.size() != static_cast<std::size_t>(inst.dual_dim()))
      throw DimensionError("start_dual", inst.dual_dim(), state.y_cur.size());
  } else if (use_instance_dgfs) {
    // Entropy blocks must start interior; others keep the exact maximizer.
    state.y_cur.assign(inst.dual_dim(), 0.0);
    for (int i = 1; i <= inst.p(); ++i) {
      const Vector yi =
          dual_dgf(inst, i, true).kind == DgfKind::entropy
              ? inst.dgf_y[i - 1].center_for(inst.Y[i - 1])
              : concave_argmax(inst.A.apply_block(i, state.x_cur),
                               inst.J[i - 1], inst.Y[i - 1]);
      inst.set_block(state.y_cur, i, yi);
    }
  } else {
    state.y_cur = initial_dual(inst, state.x_cur);
  }

  state.sum_x = KahanVectorSum(state.x_cur.size());
  state.sum_y = KahanVectorSum(state.y_cur.size());
  return state;
}

void rpd_step(const SaddleInstance& inst, const Schedule& sched,
              SolverState& state) {
  const int t = state.t;
  if (t < 1 || t > sched.steps())
    throw Error("rpd_step: t = " + std::to_string(t) + " outside 1.." +
                std::to_string(sched.steps()));
  const int i = state.rng.draw_block(inst.p());
  state.last_drawn = i;

  // Dual prox on block i only; the linear term is -(A x_bar)_i.
  Vector gi = inst.A.apply_block(i, state.x_bar);
  for (double& v : gi) v = -v;
  const Vector yi_new = prox_step(
      inst.J[i - 1], inst.Y[i - 1], dual_dgf(inst, i, state.use_instance_dgfs),
      gi, inst.block(state.y_cur, i), sched.tau(t));
  inst.set_block(state.y_cur, i, yi_new);

  // Primal prox against A^T y^{t+1}.
  const Vector gx = inst.A.adjoint_apply(state.y_cur);
  Vector x_new = prox_step(
      inst.h, inst.X,
      state.use_instance_dgfs ? inst.dgf_x : kEuclidean, gx, state.x_cur,
      sched.eta(t));

  assert(inst.X.contains(x_new, 1e-8));
  assert(inst.Y[i - 1].contains(
      Vector(inst.block(state.y_cur, i).begin(),
             inst.block(state.y_cur, i).end()),
      1e-8));

  // Extrapolation for the next dual update.
  const double q = sched.q(t);
  for (std::size_t k = 0; k < state.x_bar.size(); ++k)
    state.x_bar[k] = q * (x_new[k] - state.x_cur[k]) + x_new[k];

  state.x_prev = std::move(state.x_cur);
  state.x_cur = std::move(x_new);

  const double gamma = sched.gamma(t);
  state.weight_total.add(gamma);
  state.sum_x.add_scaled(gamma, state.x_cur);
  state.sum_y.add_scaled(gamma, state.y_cur);
  state.t = t + 1;
}

namespace {

SolverResult run_impl(const SaddleInstance& inst, const Schedule& sched,
                      std::uint64_t seed, const TraceOptions& opts,
                      bool use_instance_dgfs) {
  const auto t_start = std::chrono::steady_clock::now();
  if (sched.regime == Regime::smooth && !inst.smooth())
    throw RegimeError(
        "smooth schedule requires every dual block to have strong convexity "
        "modulus >= 1; rescale J and A rather than relying on the solver to "
        "do it silently");
  const int steps = sched.steps();

  SolverState state = make_initial_state(inst, seed, use_instance_dgfs);

  RunTrace trace;
  trace.seed = seed;
  trace.x_first = state.x_cur;
  trace.y_first = state.y_cur;
  trace.x_second_last = state.x_cur;  // x^{N-1} = x^1 when N = 2
  if (opts.record_draws) trace.draws.reserve(steps);

  auto snapshot = [&](int iterate_index) {
    trace.snapshot_t.push_back(iterate_index);
    if (inst.optimum)
      trace.dist_to_opt.push_back(vec::dist2(state.x_cur, inst.optimum->x));
    if (opts.record_iterates) {
      trace.snapshot_x.push_back(state.x_cur);
      trace.snapshot_y.push_back(state.y_cur);
      trace.snapshot_avg_x.push_back(state.average_x());
      trace.snapshot_avg_y.push_back(state.average_y());
    }
  };

  for (int t = 1; t <= steps; ++t) {
    rpd_step(inst, sched, state);
    if (opts.record_draws) trace.draws.push_back(state.last_drawn);
    if (t + 1 == sched.N - 1) trace.x_second_last = state.x_cur;
    if (opts.stride > 0 && (t % opts.stride == 0 || t == steps))
      snapshot(t + 1);
  }

  trace.x_last = state.x_cur;
  trace.y_last = state.y_cur;
  trace.gamma_sum = state.weight_total.value();

  SolverResult result;
  result.x_hat = state.average_x();
  result.y_hat = state.average_y();
  result.trace = std::move(trace);
  result.trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

}  // namespace

SolverResult run(const SaddleInstance& inst, const Schedule& sched,
                 std::uint64_t seed, const TraceOptions& opts) {
  return run_impl(inst, sched, seed, opts, /*use_instance_dgfs=*/false);
}

SolverResult run_bregman(const SaddleInstance& inst, const Schedule& sched,
                         std::uint64_t seed, const TraceOptions& opts) {
  return run_impl(inst, sched, seed, opts, /*use_instance_dgfs=*/true);
}

}  // namespace rpd
