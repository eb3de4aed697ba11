#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "json.hpp"
#include "wcost/config.hpp"
#include "wcost/error.hpp"
#include "wcost/harness.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nlohmann::json;
using namespace wcost;

namespace {

json base_config() {
  return json::parse(R"({
    "pair": {"x": {"family": "gaussian", "mean": 0, "sd": 1}},
    "cost": {"family": "power", "p": 1.5},
    "n": 200, "replications": 40, "n_sim": 200, "seed": 3,
    "grid": {"m": 127, "delta": 1e-3},
    "truncation": "warn"
  })");
}

struct QuietWarnings {
  WarningHandler prev = set_warning_handler([](std::string_view) {});
  ~QuietWarnings() { set_warning_handler(prev); }
};

}  // namespace

TEST_CASE("configurations parse with defaults", "[config]") {
  const ExperimentConfig cfg = parse_config(base_config());
  CHECK(cfg.n == 200);
  CHECK(cfg.seed == 3u);
  CHECK(cfg.pair.partition.all(Region::E));
  CHECK(cfg.pair.y.family() == "gaussian");
  CHECK(cfg.grid.m == 127);
  CHECK(cfg.truncation == TruncationPolicy::warn);
  const json resolved = resolved_config(cfg);
  CHECK(resolved.at("n") == 200);
}

TEST_CASE("configuration errors are validation errors", "[config]") {
  json j = base_config();
  j["unknown_key"] = 1;
  CHECK_THROWS_AS(parse_config(j), ValidationError);
  j = base_config();
  j["pair"]["x"]["family"] = "cauchyish";
  CHECK_THROWS_AS(parse_config(j), ValidationError);
  j = base_config();
  j["pair"]["y"] = {{"family", "gaussian"}, {"mean", 1}, {"sd", 1}};
  j["pair"]["partition"] = {{"breaks", {0, 1}}, {"labels", {"E"}}};
  CHECK_THROWS_AS(parse_config(j), ValidationError);
  j["pair"].erase("partition");
  CHECK(parse_config(j).pair.partition.all(Region::D));
  CHECK_THROWS_AS(load_config("missing_config.json"), ValidationError);
}

TEST_CASE("short cost strings", "[config]") {
  CHECK(parse_cost_string("power:1.5").b() == 1.5);
  CHECK_THAT(parse_cost_string("pinball:0.3").rho_plus(1.0), WithinRel(0.3, 1e-15));
  const CostSpec a = parse_cost_string("asymmetric:1,2,1.5,1");
  CHECK(a.b_minus == 1.5);
  CHECK(a.b_plus == 1.0);
  CHECK_THROWS_AS(parse_cost_string("power"), ValidationError);
  CHECK_THROWS_AS(parse_cost_string("cubic:3"), ValidationError);
  CHECK_THROWS_AS(parse_cost_string("asymmetric:1,2"), ValidationError);
}

TEST_CASE("Kolmogorov-Smirnov distances", "[harness]") {
  CHECK(ks_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK_THAT(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}), WithinAbs(1.0, 1e-15));
  CHECK_THAT(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4}), WithinAbs(0.5, 1e-15));
  CHECK_THAT(ks_uniform(std::vector<double>{0.25, 0.75}), WithinAbs(0.25, 1e-15));
  const auto s = summarize(std::vector<double>{1, 2, 3, 4, 5});
  CHECK(s.mean == 3.0);
  CHECK(s.median == 3.0);
  CHECK_THAT(s.sd, WithinRel(std::sqrt(2.5), 1e-15));
}

TEST_CASE("studies are reproducible across thread counts", "[harness]") {
  QuietWarnings quiet;
  const ExperimentConfig cfg = parse_config(base_config());
  const StudyResult a = run_clt_study(cfg, 1);
  const StudyResult b = run_clt_study(cfg, 4);
  CHECK(statistics_csv(a.statistics) == statistics_csv(b.statistics));
  CHECK(a.draws.values == b.draws.values);
  CHECK(a.statistics.size() == 40);
  CHECK(a.regime == Regime::equal);
  const json meta = study_json(a);
  CHECK(meta.at("config").at("seed") == 3);
  CHECK(meta.contains("environment"));
  CHECK(meta.at("hypotheses").at("verdict") == "pass");
}

TEST_CASE("a seed is mandatory", "[harness]") {
  json j = base_config();
  j.erase("seed");
  CHECK_THROWS_AS(run_clt_study(parse_config(j), 1), ValidationError);
}

TEST_CASE("statistics are written in shortest round-trip form", "[harness]") {
  const std::string csv = statistics_csv(std::vector<double>{0.1, 1.0 / 3.0});
  CHECK(csv == "replication,statistic\n0,0.1\n1,0.3333333333333333\n");
}
