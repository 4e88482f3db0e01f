#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "rpd/errors.hpp"
#include "rpd/harness.hpp"

using namespace rpd;

TEST_CASE("config parsing and validation") {
  const auto cfg = config_from_json_text(R"({
    "instance": {"kind": "matrix_game", "rows": 2, "cols": 2,
                  "matrix": [1, 0, 0, 1], "p": 1},
    "regime": "general",
    "N": [10, 100],
    "seeds": 7,
    "seed_base": 3
  })");
  CHECK(cfg.n_list == std::vector<int>{10, 100});
  CHECK(cfg.seeds == 7);
  CHECK(cfg.seed_base == 3);
  CHECK_THROWS_AS(config_from_json_text(R"({"regime":"general","N":[10]})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({
    "instance": {"kind": "counterexample_lcp", "p": 2}, "N": [1]})"),
                  ConfigError);
}

TEST_CASE("rate_fit recovers exact power laws and drops bad points") {
  const RateFit one = rate_fit({{10.0, 0.1}, {100.0, 0.01}, {1000.0, 0.001}});
  CHECK(one.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(one.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const RateFit two =
      rate_fit({{10.0, 1e-2}, {100.0, 1e-4}, {1000.0, 1e-6}, {10000.0, 1e-8}});
  CHECK(two.slope == doctest::Approx(-2.0).epsilon(1e-9));

  const RateFit dropped =
      rate_fit({{10.0, 0.1}, {20.0, 0.0}, {100.0, 0.01}, {1000.0, 0.001}});
  CHECK(dropped.points_used == 3);
  CHECK(dropped.warnings.size() == 1);

  CHECK_THROWS_AS(rate_fit({{10.0, 0.1}, {100.0, 0.0}, {1000.0, 0.0}}),
                  ConfigError);
}

TEST_CASE("estimate_expected_gap: identity game means sit under the bound") {
  const auto game =
      instance_from_json_text(R"({"kind": "matrix_game", "rows": 2, "cols": 2,
                                   "matrix": [1, 0, 0, 1], "p": 1})");
  ExperimentConfig cfg;
  cfg.regime = Regime::general_bounded;
  cfg.n_list = {100};
  cfg.seeds = 20;
  cfg.seed_base = 1;
  const auto stats = estimate_expected_gap(game, cfg);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].mean + stats[0].std_err <= stats[0].bound);
  CHECK(stats[0].mean >= 0.0);
  CHECK(static_cast<int>(stats[0].per_seed.size()) == 20);
}

TEST_CASE("estimate_expected_gap: zero operator gives zero gap, positive bound") {
  const auto inst = instance_from_json_text(R"({
    "kind": "custom",
    "operator": {"n": 2, "block_dims": [1, 1], "matrix": [0, 0, 0, 0]},
    "h": {"variant": "zero", "dim": 2},
    "X": {"variant": "simplex", "dim": 2},
    "J": [{"variant": "zero", "dim": 1}, {"variant": "zero", "dim": 1}],
    "Y": [{"variant": "box", "lower": [0], "upper": [1]},
          {"variant": "box", "lower": [0], "upper": [1]}]
  })");
  ExperimentConfig cfg;
  cfg.regime = Regime::general_bounded;
  cfg.n_list = {50};
  cfg.seeds = 5;
  const auto stats = estimate_expected_gap(inst, cfg);
  CHECK(stats[0].mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stats[0].bound > 0.0);
}

TEST_CASE("aggregation does not depend on the worker count") {
  const auto game =
      instance_from_json_text(R"({"kind": "matrix_game", "rows": 4, "cols": 4,
        "matrix": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "p": 2})");
  ExperimentConfig cfg;
  cfg.regime = Regime::general_bounded;
  cfg.n_list = {60};
  cfg.seeds = 12;

  setenv("RPD_THREADS", "1", 1);
  const auto serial = estimate_expected_gap(game, cfg);
  setenv("RPD_THREADS", "4", 1);
  const auto parallel = estimate_expected_gap(game, cfg);
  unsetenv("RPD_THREADS");
  CHECK(serial[0].per_seed == parallel[0].per_seed);
  CHECK(serial[0].mean == parallel[0].mean);
}

TEST_CASE("means are nonincreasing in N up to sampling noise; CSV is stable") {
  const auto game =
      instance_from_json_text(R"({"kind": "matrix_game", "rows": 4, "cols": 4,
        "matrix": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "p": 2})");
  ExperimentConfig cfg;
  cfg.regime = Regime::general_bounded;
  cfg.n_list = {50, 100, 200};
  cfg.seeds = 30;
  const auto stats = estimate_expected_gap(game, cfg);
  for (std::size_t k = 1; k < stats.size(); ++k)
    CHECK(stats[k].mean <=
          stats[k - 1].mean + 2.0 * (stats[k].std_err + stats[k - 1].std_err));

  // Re-running the same config reproduces the CSV byte for byte.
  const auto again = estimate_expected_gap(game, cfg);
  CHECK(gap_stats_csv_text(stats) == gap_stats_csv_text(again));
}

TEST_CASE("table1 runner: shape, reproducibility, checkpoint ordering") {
  const Table1 t = run_table1({2}, {10, 100}, 3);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].p == 2);
  REQUIRE(t.rows[0].mean_dist.size() == 2);
  const Table1 again = run_table1({2}, {10, 100}, 3);
  CHECK(t.rows[0].mean_dist == again.rows[0].mean_dist);
  CHECK_THROWS_AS(run_table1({2}, {100, 10}, 3), ConfigError);

  const std::string csv = table1_csv_text(t);
  CHECK(csv.rfind("p,dist_at_10,dist_at_100", 0) == 0);
}

TEST_CASE("csv escaping follows RFC 4180") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("manifest carries the config hash and version") {
  const std::string path = "/tmp/rpd_manifest_test.json";
  write_manifest(path, "{\"x\":1}", 0.25, {"a.csv"});
  std::ifstream is(path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("config_hash") != std::string::npos);
  CHECK(text.find(kLibraryVersion) != std::string::npos);
  CHECK(text.find("a.csv") != std::string::npos);
  std::remove(path.c_str());

  CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
  CHECK(fnv1a_hash("same") == fnv1a_hash("same"));
}

TEST_CASE("gap stats CSV has the full header") {
  GapStats s;
  s.N = 10;
  s.mean = 0.5;
  const std::string csv = gap_stats_csv_text({s});
  CHECK(csv.rfind("N,mean_gap,stddev,std_err,bound,mean_v_norm,v_norm_bound",
                  0) == 0);
}
