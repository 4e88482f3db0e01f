#include "rpd/quality.hpp"

#include <cmath>

#include "json.hpp"
#include "rpd/errors.hpp"

namespace rpd {

double gap_Q0(const SaddleInstance& inst, const Vector& xh, const Vector& yh,
              const Vector& x, const Vector& y) {
  const Vector axh = inst.A.apply(xh);
  const Vector ax = inst.A.apply(x);
  return (inst.h.value(xh) + vec::dot(axh, y) - inst.J_value(y)) -
         (inst.h.value(x) + vec::dot(ax, yh) - inst.J_value(yh));
}

double sup_gap_g0(const SaddleInstance& inst, const Vector& xh,
                  const Vector& yh) {
  if (!inst.X.bounded() || !inst.dual_bounded())
    throw UnboundedError(
        "sup_gap_g0 needs bounded X and Y; use the perturbation-based "
        "certificate (perturbation_vector / perturbed_gap_at) on unbounded "
        "instances");
  const Vector axh = inst.A.apply(xh);
  double best_dual = 0.0;
  for (int i = 1; i <= inst.p(); ++i) {
    const auto gi = inst.block(axh, i);
    best_dual += concave_max_value(Vector(gi.begin(), gi.end()),
                                   inst.J[i - 1], inst.Y[i - 1]);
  }
  Vector neg_aty = inst.A.adjoint_apply(yh);
  for (double& v : neg_aty) v = -v;
  const double best_primal = concave_max_value(neg_aty, inst.h, inst.X);
  return best_dual + inst.h.value(xh) + best_primal + inst.J_value(yh);
}

Perturbation perturbation_vector(const SaddleInstance& inst,
                                 const Schedule& sched, const RunTrace& trace) {
  if (trace.x_first.empty() || trace.x_last.empty() ||
      trace.x_second_last.empty() || trace.y_first.empty() ||
      trace.y_last.empty())
    throw Error("perturbation_vector: trace is missing run endpoints");
  const int K = sched.steps();
  const double inv = 1.0 / trace.gamma_sum;
  const double ge = sched.gamma(K) * sched.eta(K);

  Perturbation v;
  v.vx = vec::sub(trace.x_last, trace.x_first);
  for (double& w : v.vx) w *= 0.5 * ge * inv;

  const Vector ax_last = inst.A.apply(trace.x_last);
  const Vector ax_prev = inst.A.apply(trace.x_second_last);
  v.vy = vec::sub(ax_last, ax_prev);
  const double half_tau = 0.5 * sched.tau(K);
  for (std::size_t i = 0; i < v.vy.size(); ++i)
    v.vy[i] = (v.vy[i] + half_tau * (trace.y_last[i] - trace.y_first[i])) * inv;

  v.norm = std::sqrt(vec::norm2_sq(v.vx) + vec::norm2_sq(v.vy));
  return v;
}

double perturbed_gap_at(const SaddleInstance& inst, const Vector& xh,
                        const Vector& yh, const Perturbation& v,
                        const Vector& x_ref, const Vector& y_ref) {
  const double q0 = gap_Q0(inst, xh, yh, x_ref, y_ref);
  const double corr = vec::dot(v.vx, vec::sub(xh, x_ref)) +
                      vec::dot(v.vy, vec::sub(yh, y_ref));
  return q0 - corr;
}

double perturbed_gap_certificate(const SaddleInstance& inst, const Vector& xh,
                                 const Vector& yh, const Perturbation& v_n) {
  if (!inst.optimum)
    throw Error("perturbed_gap_certificate: instance has no known saddle point");
  Perturbation neg;
  neg.vx = vec::scaled(v_n.vx, -1.0);
  neg.vy = vec::scaled(v_n.vy, -1.0);
  neg.norm = v_n.norm;
  return perturbed_gap_at(inst, xh, yh, neg, inst.optimum->x, inst.optimum->y);
}

double distance_D(const SaddleInstance& inst, const Schedule& sched) {
  if (!inst.optimum)
    throw Error("distance_D: instance has no known saddle point");
  const Vector x1 = default_start(inst);
  const Vector y1 = resolve_initial_dual(inst, x1);
  const double dx = vec::dist2(inst.optimum->x, x1);
  const double dy = vec::dist2(inst.optimum->y, y1);
  const double ratio = sched.tau(1) / (sched.eta(1) * sched.gamma(1));
  return std::sqrt(dx * dx + ratio * dy * dy);
}

GapReport make_gap_report(const SaddleInstance& inst, const Schedule& sched,
                          const SolverResult& result, double theory_bound) {
  GapReport report;
  report.N = sched.N;
  report.seed = result.trace.seed;
  report.theory_bound = theory_bound;
  if (inst.optimum)
    report.q0_at_star = gap_Q0(inst, result.x_hat, result.y_hat,
                               inst.optimum->x, inst.optimum->y);
  if (inst.X.bounded() && inst.dual_bounded())
    report.g0 = sup_gap_g0(inst, result.x_hat, result.y_hat);
  else {
    report.v_n = perturbation_vector(inst, sched, result.trace);
    if (inst.optimum)
      report.perturbed_gap =
          perturbed_gap_certificate(inst, result.x_hat, result.y_hat, *report.v_n);
  }
  return report;
}

std::string GapReport::to_json_text() const {
  nlohmann::json j;
  j["N"] = N;
  j["seed"] = seed;
  j["theory_bound"] = theory_bound;
  if (q0_at_star) j["Q0_at_star"] = *q0_at_star;
  if (g0) j["g0"] = *g0;
  if (v_n) {
    j["v_N"] = {{"primal", v_n->vx}, {"dual", v_n->vy}};
    j["v_N_norm"] = v_n->norm;
  }
  if (perturbed_gap) j["perturbed_gap_at_star"] = *perturbed_gap;
  return j.dump();
}

}  // namespace rpd
