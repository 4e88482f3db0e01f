#include "rpd/schedules.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rpd/errors.hpp"

namespace rpd {

namespace {
constexpr double kSlack = 1e-9;

void require_common(int p, double norm_a, int N) {
  if (p < 1) throw Error("schedule: p must be >= 1");
  if (norm_a <= 0.0) throw Error("schedule: operator norm must be positive");
  if (N < 2) throw Error("schedule: N must be >= 2");
}
}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::general_bounded:
      return "general";
    case Regime::smooth:
      return "smooth";
    case Regime::unbounded:
      return "unbounded";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "general" || name == "general_bounded") return Regime::general_bounded;
  if (name == "smooth") return Regime::smooth;
  if (name == "unbounded") return Regime::unbounded;
  throw ConfigError("unknown regime: " + name);
}

double Schedule::gamma_sum() const {
  KahanSum s;
  for (double g : gamma_) s.add(g);
  return s.value();
}

Schedule general_bounded_schedule(int p, double norm_a, double omega_x,
                                  double omega_y, int N) {
  require_common(p, norm_a, N);
  if (!(omega_x > 0.0) || !std::isfinite(omega_x) || !(omega_y > 0.0) ||
      !std::isfinite(omega_y))
    throw RegimeError(
        "general_bounded_schedule: diameters must be positive and finite; "
        "use the unbounded regime for unbounded feasible sets");
  const double sp = std::sqrt(static_cast<double>(p));
  Schedule s;
  s.regime = Regime::general_bounded;
  s.N = N;
  const int steps = N - 1;
  s.tau_.assign(steps, sp * norm_a * omega_x / omega_y);
  s.eta_.assign(steps, p * sp * norm_a * omega_y / omega_x);
  s.eta_[steps - 1] = sp * norm_a * omega_y / omega_x;
  s.q_.assign(steps, static_cast<double>(p));
  s.gamma_.assign(steps, 1.0 / p);
  s.gamma_[steps - 1] = 1.0;
  return s;
}

Schedule smooth_schedule(int p, double norm_a, int N) {
  require_common(p, norm_a, N);
  Schedule s;
  s.regime = Regime::smooth;
  s.N = N;
  const int steps = N - 1;
  s.tau_.resize(steps);
  s.eta_.resize(steps);
  s.q_.resize(steps);
  s.gamma_.resize(steps);
  s.theta_.resize(steps);
  const double dp = static_cast<double>(p);
  const double a2 = norm_a * norm_a;
  for (int t = 1; t <= steps; ++t) {
    const double dt = static_cast<double>(t);
    s.q_[t - 1] = dp * (dt + 3 * dp) / (dt + 3 * dp + 1);
    s.theta_[t - 1] = dt + 3 * dp;
    s.tau_[t - 1] = (dt + dp) / (2 * dp);
    s.eta_[t - 1] = 2 * dp * dp * dp * a2 / (dt + 2 * dp + 1);
    s.gamma_[t - 1] = (dt + 2 * dp + 1) / dp;
  }
  s.gamma_[steps - 1] = static_cast<double>(N) + 3 * dp - 1;
  return s;
}

Schedule unbounded_schedule(int p, double norm_a, int N) {
  require_common(p, norm_a, N);
  const double dp = static_cast<double>(p);
  Schedule s;
  s.regime = Regime::unbounded;
  s.N = N;
  const int steps = N - 1;
  const double step = norm_a * dp * std::sqrt(dp);
  s.tau_.assign(steps, step);
  s.eta_.assign(steps, step);
  s.eta_[steps - 1] = norm_a * std::sqrt(dp);
  s.q_.assign(steps, dp);
  s.gamma_.assign(steps, 1.0 / dp);
  s.gamma_[steps - 1] = 1.0;
  return s;
}

// --- validation --------------------------------------------------------------

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void begin(const std::string& name, int t_lo, int t_hi) {
    report_.condition_names.push_back(name);
    report_.worst_slack.push_back(std::numeric_limits<double>::infinity());
    report_.t_ranges.emplace_back(t_lo, t_hi);
    current_ = name;
  }

  // lhs >= rhs up to relative slack
  void geq(int t, double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    const double slack = lhs - rhs;
    auto& worst = report_.worst_slack.back();
    worst = std::min(worst, slack);
    if (slack < -kSlack * scale)
      report_.violations.push_back({current_, t, lhs, rhs});
  }

  // lhs == rhs up to relative slack
  void eq(int t, double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    const double slack = -std::abs(lhs - rhs);
    auto& worst = report_.worst_slack.back();
    worst = std::min(worst, slack);
    if (std::abs(lhs - rhs) > kSlack * scale)
      report_.violations.push_back({current_, t, lhs, rhs});
  }

 private:
  ValidationReport& report_;
  std::string current_;
};

}  // namespace

bool ValidationReport::violated(const std::string& condition) const {
  for (const auto& v : violations)
    if (v.condition == condition) return true;
  return false;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < condition_names.size(); ++i) {
    os << (worst_slack[i] < 0 && violated(condition_names[i]) ? "FAIL" : "ok  ")
       << "  " << condition_names[i] << "  t=" << t_ranges[i].first << ".."
       << t_ranges[i].second << "  worst_slack=";
    if (t_ranges[i].second < t_ranges[i].first)
      os << "n/a (empty range)";
    else
      os << worst_slack[i];
    os << "\n";
  }
  for (const auto& v : violations)
    os << "violated: " << v.condition << " at t=" << v.t << " (lhs=" << v.lhs
       << ", rhs=" << v.rhs << ")\n";
  return os.str();
}

ValidationReport validate_general(const Schedule& s, int p, double norm_a) {
  ValidationReport report;
  Checker chk(report);
  const int K = s.steps();
  const double dp = static_cast<double>(p);
  const double a2 = norm_a * norm_a;

  chk.begin("q[t] = p", 1, K);
  for (int t = 1; t <= K; ++t) chk.eq(t, s.q(t), dp);

  chk.begin("gamma[t] = q[t]/p - (p-1)/p", 1, K - 1);
  for (int t = 1; t <= K - 1; ++t)
    chk.eq(t, s.gamma(t), s.q(t) / dp - (dp - 1) / dp);

  chk.begin("gamma[N-1] = 1", K, K);
  chk.eq(K, s.gamma(K), 1.0);

  chk.begin("tau[t-1] >= tau[t]", 2, K);
  for (int t = 2; t <= K; ++t) chk.geq(t, s.tau(t - 1), s.tau(t));

  chk.begin("gamma[t-1]*eta[t-1] >= gamma[t]*eta[t]", 2, K);
  for (int t = 2; t <= K; ++t)
    chk.geq(t, s.gamma(t - 1) * s.eta(t - 1), s.gamma(t) * s.eta(t));

  chk.begin("p*gamma[t]*eta[t]*tau[t+1] >= q[t]^2*normA^2", 1, K - 1);
  for (int t = 1; t <= K - 1; ++t)
    chk.geq(t, dp * s.gamma(t) * s.eta(t) * s.tau(t + 1), s.q(t) * s.q(t) * a2);

  chk.begin("gamma[N-1]*eta[N-1]*tau[N-1] >= normA^2", K, K);
  chk.geq(K, s.gamma(K) * s.eta(K) * s.tau(K), a2);

  return report;
}

// The smooth conditions fold the unit strong-convexity modulus of the dual
// blocks into the prox weight: wherever tau pairs against normA^2, the
// effective weight is 1 + tau. The closed-form smooth schedule satisfies
// these with equality at p = 1.
ValidationReport validate_smooth(const Schedule& s, int p, double norm_a) {
  ValidationReport report;
  Checker chk(report);
  const int K = s.steps();
  const double dp = static_cast<double>(p);
  const double a2 = norm_a * norm_a;
  if (s.theta_.size() != static_cast<std::size_t>(K)) {
    report.violations.push_back({"theta present", 0, 0.0, 0.0});
    return report;
  }

  chk.begin("theta[t] = (q[t]/p)*theta[t+1]", 1, K - 1);
  for (int t = 1; t <= K - 1; ++t)
    chk.eq(t, s.theta(t), s.q(t) / dp * s.theta(t + 1));

  chk.begin("gamma[t] = (q[t]/p - (p-1)/p)*theta[t+1]", 1, K - 1);
  for (int t = 1; t <= K - 1; ++t)
    chk.eq(t, s.gamma(t), (s.q(t) / dp - (dp - 1) / dp) * s.theta(t + 1));

  chk.begin("gamma[N-1] = theta[N-1]", K, K);
  chk.eq(K, s.gamma(K), s.theta(K));

  chk.begin("theta[t]*(1+tau[t]) >= theta[t+1]*((p-1)/p + tau[t+1])", 1, K - 1);
  for (int t = 1; t <= K - 1; ++t)
    chk.geq(t, s.theta(t) * (1.0 + s.tau(t)),
            s.theta(t + 1) * ((dp - 1) / dp + s.tau(t + 1)));

  // Monotonicity over the non-specialized indices; the final index carries
  // gamma[N-1] = theta[N-1] and is covered by the final-step condition.
  chk.begin("gamma[t]*eta[t] >= gamma[t+1]*eta[t+1]", 1, K - 2);
  for (int t = 1; t <= K - 2; ++t)
    chk.geq(t, s.gamma(t) * s.eta(t), s.gamma(t + 1) * s.eta(t + 1));

  chk.begin("p*gamma[t-1]*eta[t-1]*(1+tau[t]) >= q[t-1]^2*theta[t]*normA^2", 2, K);
  for (int t = 2; t <= K; ++t)
    chk.geq(t, dp * s.gamma(t - 1) * s.eta(t - 1) * (1.0 + s.tau(t)),
            s.q(t - 1) * s.q(t - 1) * s.theta(t) * a2);

  chk.begin("eta[N-1]*(1+tau[N-1]) >= normA^2", K, K);
  chk.geq(K, s.eta(K) * (1.0 + s.tau(K)), a2);

  return report;
}

ValidationReport validate_unbounded(const Schedule& s, int p, double norm_a) {
  ValidationReport report = validate_general(s, p, norm_a);
  Checker chk(report);
  const int K = s.steps();

  chk.begin("tau[t-1] = tau[t]", 2, K);
  for (int t = 2; t <= K; ++t) chk.eq(t, s.tau(t - 1), s.tau(t));

  chk.begin("gamma[t-1]*eta[t-1] = gamma[t]*eta[t]", 2, K);
  for (int t = 2; t <= K; ++t)
    chk.eq(t, s.gamma(t - 1) * s.eta(t - 1), s.gamma(t) * s.eta(t));

  chk.begin("gamma[t-1] = gamma[t]", 2, K - 1);
  for (int t = 2; t <= K - 1; ++t) chk.eq(t, s.gamma(t - 1), s.gamma(t));

  return report;
}

ValidationReport validate(const Schedule& s, int p, double norm_a) {
  switch (s.regime) {
    case Regime::general_bounded:
      return validate_general(s, p, norm_a);
    case Regime::smooth:
      return validate_smooth(s, p, norm_a);
    case Regime::unbounded:
      return validate_unbounded(s, p, norm_a);
  }
  throw Error("validate: unknown regime");
}

// --- bounds -------------------------------------------------------------------

double bound_general(int p, double norm_a, double omega_x, double omega_y,
                     int N) {
  require_common(p, norm_a, N);
  const double dp = static_cast<double>(p);
  return dp * std::sqrt(dp) * norm_a * omega_x * omega_y / (N + dp - 2);
}

double bound_smooth(int p, double norm_a, double omega_x, double omega_y,
                    int N) {
  require_common(p, norm_a, N);
  const double dp = static_cast<double>(p);
  const double a2 = norm_a * norm_a;
  return 2.0 / (static_cast<double>(N) * (N + dp)) *
         (dp * dp * dp * a2 * omega_x * omega_x +
          4.5 * dp * dp * omega_y * omega_y);
}

UnboundedBounds bound_unbounded(int p, double norm_a, double distance, int N) {
  require_common(p, norm_a, N);
  const double dp = static_cast<double>(p);
  UnboundedBounds b;
  b.gap = 5.0 * dp * std::sqrt(dp) * norm_a * distance * distance / (N + dp - 2);
  b.v_norm = dp / (N + dp - 2) * (4.0 * std::sqrt(dp) + 1.0 + std::sqrt(2.0)) *
             norm_a * distance;
  return b;
}

double k_constant(const Schedule& s, double norm_a) {
  const int K = s.steps();
  const double ge = s.gamma(K) * s.eta(K);
  return 2.0 * ge + 2.0 * std::sqrt(s.gamma(K) * s.tau(K) * s.eta(K)) +
         norm_a * (1.0 + std::sqrt(2.0));
}

double v_norm_bound_from_k(const Schedule& s, double norm_a, double distance) {
  return k_constant(s, norm_a) * distance / s.gamma_sum();
}

double bregman_gap_bound(const Schedule& s, double d_x, double d_y) {
  return (s.gamma(1) * s.eta(1) * d_x + s.tau(1) * d_y) / s.gamma_sum();
}

}  // namespace rpd
