#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rpd/problems.hpp"
#include "rpd/schedules.hpp"
#include "rpd/solver.hpp"
#include "rpd/vec.hpp"

namespace rpd {

// Primal-dual suboptimality of zhat = (xh, yh) witnessed by z = (x, y):
// [h(xh) + <A xh, y> - J(y)] - [h(x) + <A x, yh> - J(yh)].
double gap_Q0(const SaddleInstance& inst, const Vector& xh, const Vector& yh,
              const Vector& x, const Vector& y);

// Exact supremum of Q0 over Z = X x Y via the per-set concave maximizer
// oracles. Requires bounded X and Y; throws UnboundedError directing the
// caller to the perturbation-based certificate otherwise.
double sup_gap_g0(const SaddleInstance& inst, const Vector& xh,
                  const Vector& yh);

// Perturbation certificate for unbounded instances.
struct Perturbation {
  Vector vx, vy;
  double norm = 0.0;
};

// v_N = (sum gamma)^{-1} ( (gamma_{N-1} eta_{N-1} / 2)(x^N - x^1),
//                          A x^N - A x^{N-1} + (tau_{N-1} / 2)(y^N - y^1) ).
// The trace must retain the endpoints (the solver always does).
Perturbation perturbation_vector(const SaddleInstance& inst,
                                 const Schedule& sched, const RunTrace& trace);

// Q0(zhat, z_ref) - <v, zhat - z_ref>. With v = 0 this is gap_Q0. The
// certified quantity bounded by the unbounded-regime theory is obtained by
// passing the negated perturbation vector (see perturbed_gap_certificate).
double perturbed_gap_at(const SaddleInstance& inst, const Vector& xh,
                        const Vector& yh, const Perturbation& v,
                        const Vector& x_ref, const Vector& y_ref);

// Q0(zhat, z*) + <v_N, zhat - z*>, the quantity the unbounded-regime rate
// bound controls, evaluated at the known saddle point.
double perturbed_gap_certificate(const SaddleInstance& inst, const Vector& xh,
                                 const Vector& yh, const Perturbation& v_n);

// D = sqrt(||x* - x^1||^2 + tau_1 / (eta_1 gamma_1) ||y* - y^1||^2) with
// (x^1, y^1) from the solver's start rule. Requires a known saddle point.
double distance_D(const SaddleInstance& inst, const Schedule& sched);

struct GapReport {
  int N = 0;
  std::uint64_t seed = 0;
  std::optional<double> q0_at_star;
  std::optional<double> g0;
  std::optional<Perturbation> v_n;
  std::optional<double> perturbed_gap;
  double theory_bound = 0.0;

  std::string to_json_text() const;
};

// Evaluate every certificate the instance supports for one finished run.
GapReport make_gap_report(const SaddleInstance& inst, const Schedule& sched,
                          const SolverResult& result, double theory_bound);

}  // namespace rpd
