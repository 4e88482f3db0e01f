#include "doctest.h"

#include <cmath>

#include "rpd/errors.hpp"
#include "rpd/schedules.hpp"

using namespace rpd;

TEST_CASE("general schedule: closed-form entries at p=4 and the p=1 reduction") {
  const Schedule s = general_bounded_schedule(4, 1.0, 1.0, 1.0, 10);
  for (int t = 1; t <= 8; ++t) {
    CHECK(s.tau(t) == doctest::Approx(2.0));
    CHECK(s.eta(t) == doctest::Approx(8.0));
    CHECK(s.gamma(t) == doctest::Approx(0.25));
    CHECK(s.q(t) == doctest::Approx(4.0));
  }
  CHECK(s.tau(9) == doctest::Approx(2.0));
  CHECK(s.eta(9) == doctest::Approx(2.0));
  CHECK(s.gamma(9) == doctest::Approx(1.0));
  CHECK(validate_general(s, 4, 1.0).pass());

  const Schedule s1 = general_bounded_schedule(1, 2.0, 3.0, 5.0, 6);
  for (int t = 1; t <= 5; ++t) {
    CHECK(s1.tau(t) == doctest::Approx(2.0 * 3.0 / 5.0));
    CHECK(s1.eta(t) == doctest::Approx(2.0 * 5.0 / 3.0));
    CHECK(s1.gamma(t) == doctest::Approx(1.0));
    CHECK(s1.q(t) == doctest::Approx(1.0));
  }
  CHECK(validate_general(s1, 1, 2.0).pass());
}

TEST_CASE("general schedule rejects unbounded diameters") {
  CHECK_THROWS_WITH_AS(
      general_bounded_schedule(2, 1.0, 1.0,
                               std::numeric_limits<double>::infinity(), 10),
      doctest::Contains("unbounded regime"), RegimeError);
  CHECK_THROWS_AS(general_bounded_schedule(2, 1.0, 0.0, 1.0, 10), RegimeError);
}

TEST_CASE("smooth schedule: closed-form entries at p=2 and p=1") {
  const double a2 = 1.0;
  const Schedule s2 = smooth_schedule(2, 1.0, 10);
  CHECK(s2.q(1) == doctest::Approx(1.75));
  CHECK(s2.gamma(1) == doctest::Approx(3.0));
  CHECK(s2.theta(1) == doctest::Approx(7.0));
  CHECK(s2.tau(1) == doctest::Approx(0.75));
  CHECK(s2.eta(1) == doctest::Approx(16.0 * a2 / 6.0));
  CHECK(validate_smooth(s2, 2, 1.0).pass());

  const Schedule s1 = smooth_schedule(1, 1.0, 10);
  CHECK(s1.q(1) == doctest::Approx(0.8));
  CHECK(s1.gamma(1) == doctest::Approx(4.0));
  CHECK(s1.theta(1) == doctest::Approx(4.0));
  CHECK(s1.tau(1) == doctest::Approx(1.0));
  CHECK(s1.eta(1) == doctest::Approx(0.5));
  CHECK(validate_smooth(s1, 1, 1.0).pass());
}

TEST_CASE("smooth validator passes the stated grid including the N=2 edge") {
  for (int p : {1, 2, 5})
    for (int n : {3, 10, 100})
      CHECK(validate_smooth(smooth_schedule(p, 2.5, n), p, 2.5).pass());
  CHECK(validate_smooth(smooth_schedule(1, 1.0, 2), 1, 1.0).pass());
  CHECK(validate_smooth(smooth_schedule(3, 1.0, 2), 3, 1.0).pass());
}

TEST_CASE("unbounded schedule: closed-form entries and validation") {
  const Schedule s = unbounded_schedule(4, 1.0, 10);
  for (int t = 1; t <= 8; ++t) {
    CHECK(s.tau(t) == doctest::Approx(8.0));
    CHECK(s.eta(t) == doctest::Approx(8.0));
    CHECK(s.gamma(t) == doctest::Approx(0.25));
    CHECK(s.q(t) == doctest::Approx(4.0));
  }
  CHECK(s.tau(9) == doctest::Approx(8.0));
  CHECK(s.eta(9) == doctest::Approx(2.0));
  CHECK(s.gamma(9) == doctest::Approx(1.0));
  CHECK(validate_unbounded(s, 4, 1.0).pass());

  const Schedule s1 = unbounded_schedule(1, 3.0, 7);
  for (int t = 1; t <= 6; ++t) {
    CHECK(s1.tau(t) == doctest::Approx(3.0));
    CHECK(s1.eta(t) == doctest::Approx(3.0));
  }
  CHECK(validate_unbounded(s1, 1, 3.0).pass());
}

TEST_CASE("constructors pass their validators over a (p, N) sweep") {
  for (int p = 1; p <= 8; ++p)
    for (int n : {2, 3, 5, 9, 17, 33, 64}) {
      CAPTURE(p);
      CAPTURE(n);
      CHECK(validate_general(general_bounded_schedule(p, 1.3, 0.7, 2.1, n), p, 1.3)
                .pass());
      CHECK(validate_smooth(smooth_schedule(p, 1.3, n), p, 1.3).pass());
      CHECK(validate_unbounded(unbounded_schedule(p, 1.3, n), p, 1.3).pass());
    }
}

TEST_CASE("validators report the perturbed condition with its index") {
  // Halving eta_1 breaks the step-coupling inequality at t = 1.
  Schedule s = general_bounded_schedule(3, 1.0, 1.0, 1.0, 12);
  s.eta_[0] *= 0.5;
  const auto report = validate_general(s, 3, 1.0);
  CHECK_FALSE(report.pass());
  CHECK(report.violated("p*gamma[t]*eta[t]*tau[t+1] >= q[t]^2*normA^2"));
  bool at_t1 = false;
  for (const auto& v : report.violations)
    if (v.condition == "p*gamma[t]*eta[t]*tau[t+1] >= q[t]^2*normA^2" && v.t == 1)
      at_t1 = true;
  CHECK(at_t1);

  // Growing tau_2 breaks monotonicity.
  Schedule st = general_bounded_schedule(3, 1.0, 1.0, 1.0, 12);
  st.tau_[1] *= 1.5;
  CHECK(validate_general(st, 3, 1.0).violated("tau[t-1] >= tau[t]"));

  // Shrinking the final eta breaks the last-step condition.
  Schedule sf = general_bounded_schedule(3, 1.0, 1.0, 1.0, 12);
  sf.eta_[sf.steps() - 1] *= 1e-3;
  CHECK(validate_general(sf, 3, 1.0)
            .violated("gamma[N-1]*eta[N-1]*tau[N-1] >= normA^2"));

  // Perturbing theta_2 breaks the smooth coupling identity.
  Schedule sm = smooth_schedule(2, 1.0, 12);
  sm.theta_[1] *= 1.1;
  CHECK(validate_smooth(sm, 2, 1.0).violated("theta[t] = (q[t]/p)*theta[t+1]"));

  // Perturbing gamma_2 breaks the smooth gamma coupling.
  Schedule sg = smooth_schedule(2, 1.0, 12);
  sg.gamma_[1] *= 1.1;
  CHECK(validate_smooth(sg, 2, 1.0)
            .violated("gamma[t] = (q[t]/p - (p-1)/p)*theta[t+1]"));

  // Breaking constancy is caught by the unbounded extras only.
  Schedule su = unbounded_schedule(2, 1.0, 12);
  su.tau_[3] *= 0.9;
  CHECK(validate_general(su, 2, 1.0).pass() == false);  // monotone also bent
  CHECK(validate_unbounded(su, 2, 1.0).violated("tau[t-1] = tau[t]"));

  // The report text carries one line per condition.
  const auto text = validate_general(s, 3, 1.0).to_text();
  CHECK(text.find("worst_slack") != std::string::npos);
  CHECK(text.find("violated:") != std::string::npos);
}

TEST_CASE("closed-form bounds match hand evaluations") {
  CHECK(bound_general(4, 1.0, 1.0, 1.0, 10) == doctest::Approx(8.0 / 12.0));
  CHECK(bound_smooth(1, 1.0, 1.0, 1.0, 10) == doctest::Approx(0.1));
  const auto ub = bound_unbounded(1, 1.0, 1.0, 10);
  CHECK(ub.gap == doctest::Approx(5.0 / 9.0));
  CHECK(ub.v_norm == doctest::Approx((1.0 / 9.0) * (4.0 + 1.0 + std::sqrt(2.0))));
}

TEST_CASE("bounds decrease in N; the smooth bound decays quadratically") {
  for (int n : {8, 16, 32, 64, 128}) {
    CHECK(bound_general(3, 1.0, 1.0, 1.0, 2 * n) <
          bound_general(3, 1.0, 1.0, 1.0, n));
    CHECK(bound_unbounded(3, 1.0, 1.0, 2 * n).gap <
          bound_unbounded(3, 1.0, 1.0, n).gap);
  }
  // Quadratic decay kicks in once N dominates p (N >= 12p).
  for (int p : {1, 2, 4}) {
    const int n = 16 * p;
    const double ratio = bound_smooth(p, 1.0, 1.0, 1.0, 2 * n) /
                         bound_smooth(p, 1.0, 1.0, 1.0, n);
    CHECK(ratio <= 0.26);
  }
}

TEST_CASE("gamma-sum identities") {
  for (int p : {1, 2, 5})
    for (int n : {2, 7, 33}) {
      const Schedule g = general_bounded_schedule(p, 1.0, 1.0, 1.0, n);
      CHECK(g.gamma_sum() ==
            doctest::Approx((n + p - 2.0) / p).epsilon(1e-12));
      const Schedule u = unbounded_schedule(p, 1.0, n);
      CHECK(u.gamma_sum() ==
            doctest::Approx((n + p - 2.0) / p).epsilon(1e-12));
      const Schedule s = smooth_schedule(p, 1.0, n);
      CHECK(s.gamma_sum() >= n * (n + p) / (2.0 * p) - 1e-9);
    }
}

TEST_CASE("K constant agrees with the closed v-norm bound at p=1") {
  const Schedule s = unbounded_schedule(1, 2.0, 25);
  const double via_k = v_norm_bound_from_k(s, 2.0, 1.5);
  const double closed = bound_unbounded(1, 2.0, 1.5, 25).v_norm;
  CHECK(via_k == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("bregman bound reduces to the general bound at euclidean diameters") {
  // With D = Omega^2/2 the schedule built from sqrt(2D) is the standard one
  // and (gamma_1 eta_1 D_X + tau_1 D_Y) / sum(gamma) collapses to the
  // Omega-based closed form.
  const double wx = 1.3, wy = 0.6;
  const Schedule s = general_bounded_schedule(3, 2.0, wx, wy, 20);
  const double b = bregman_gap_bound(s, 0.5 * wx * wx, 0.5 * wy * wy);
  CHECK(b == doctest::Approx(bound_general(3, 2.0, wx, wy, 20)).epsilon(1e-12));
}
