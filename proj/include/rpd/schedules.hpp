#pragma once

#include <string>
#include <vector>

#include "rpd/vec.hpp"

namespace rpd {

enum class Regime { general_bounded, smooth, unbounded };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// Per-iteration parameter sequences for one solver run of fixed budget N.
// Sequences are indexed by the iteration counter t = 1..N-1 (the final
// entries are specialized, so N must be known at construction); storage is
// 0-based with tau(t) == tau_[t-1] and likewise for the others.
struct Schedule {
  Regime regime = Regime::general_bounded;
  int N = 2;
  Vector tau_;    // dual block prox weights
  Vector eta_;    // primal prox weights
  Vector q_;      // extrapolation parameters
  Vector gamma_;  // averaging weights
  Vector theta_;  // smooth-regime coupling weights (empty otherwise)

  double tau(int t) const { return tau_[t - 1]; }
  double eta(int t) const { return eta_[t - 1]; }
  double q(int t) const { return q_[t - 1]; }
  double gamma(int t) const { return gamma_[t - 1]; }
  double theta(int t) const { return theta_[t - 1]; }
  int steps() const { return N - 1; }

  double gamma_sum() const;
};

// Constant-stepsize schedule for general convex problems over bounded sets:
//   gamma_t = 1/p (t <= N-2), gamma_{N-1} = 1;  tau_t = sqrt(p) normA Wx/Wy;
//   eta_t = p^{3/2} normA Wy/Wx (t <= N-2), eta_{N-1} = sqrt(p) normA Wy/Wx;
//   q_t = p.
Schedule general_bounded_schedule(int p, double norm_a, double omega_x,
                                  double omega_y, int N);

// Accelerating schedule for instances whose J_i all have modulus >= 1:
//   q_t = p(t+3p)/(t+3p+1); gamma_t = (t+2p+1)/p (t <= N-2),
//   gamma_{N-1} = N+3p-1; theta_t = t+3p; tau_t = (t+p)/(2p);
//   eta_t = 2 p^3 normA^2 / (t+2p+1).
Schedule smooth_schedule(int p, double norm_a, int N);

// Constant schedule for unbounded feasible sets:
//   q_t = p; gamma as in the general case; tau_t = normA p^{3/2};
//   eta_t = normA p^{3/2} (t <= N-2), eta_{N-1} = normA sqrt(p).
Schedule unbounded_schedule(int p, double norm_a, int N);

// One violated condition: name, iteration index, and both sides.
struct ConditionViolation {
  std::string condition;
  int t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ValidationReport {
  std::vector<ConditionViolation> violations;
  // Worst slack (lhs - rhs, negative means violated) seen per condition,
  // in a stable order for text reports.
  std::vector<std::string> condition_names;
  std::vector<double> worst_slack;
  std::vector<std::pair<int, int>> t_ranges;

  bool pass() const { return violations.empty(); }
  bool violated(const std::string& condition) const;
  std::string to_text() const;
};

// Inequalities accept relative slack 1e-9; equality conditions are checked
// as two-sided inequalities with the same slack.
ValidationReport validate_general(const Schedule& s, int p, double norm_a);
ValidationReport validate_smooth(const Schedule& s, int p, double norm_a);
// validate_general plus the constant-sequence requirements of the
// unbounded regime.
ValidationReport validate_unbounded(const Schedule& s, int p, double norm_a);
ValidationReport validate(const Schedule& s, int p, double norm_a);

// Closed-form rate bounds ----------------------------------------------------

// p^{3/2} normA Wx Wy / (N + p - 2)
double bound_general(int p, double norm_a, double omega_x, double omega_y,
                     int N);
// 2 / (N (N + p)) * [p^3 normA^2 Wx^2 + 4.5 p^2 Wy^2]
double bound_smooth(int p, double norm_a, double omega_x, double omega_y,
                    int N);

struct UnboundedBounds {
  double gap = 0.0;     // 5 p^{3/2} normA D^2 / (N + p - 2)
  double v_norm = 0.0;  // p (4 sqrt(p) + 1 + sqrt(2)) normA D / (N + p - 2)
};
UnboundedBounds bound_unbounded(int p, double norm_a, double distance, int N);

// K = 2 g_{N-1} e_{N-1} + 2 sqrt(g_{N-1} t_{N-1} e_{N-1}) + normA (1+sqrt 2),
// giving the perturbation-norm bound K D / sum(gamma).
double k_constant(const Schedule& s, double norm_a);
double v_norm_bound_from_k(const Schedule& s, double norm_a, double distance);

// Non-Euclidean gap bound evaluated from a schedule's first-step entries:
// (gamma_1 eta_1 D_X + tau_1 D_Y) / sum(gamma). With Euclidean distance
// generators (D = Omega^2 / 2) this is exactly the general closed form.
double bregman_gap_bound(const Schedule& s, double d_x, double d_y);

}  // namespace rpd
