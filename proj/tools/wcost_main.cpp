// Command-line front end: estimate, test, check, simulate-limit, study.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure,
// 4 a required hypothesis check failed.

#include <cstdint>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wcost/assumptions.hpp"
#include "wcost/config.hpp"
#include "wcost/error.hpp"
#include "wcost/estimator.hpp"
#include "wcost/harness.hpp"
#include "wcost/inference.hpp"
#include "wcost/limitlaw.hpp"
#include "wcost/sample.hpp"

namespace {

using nlohmann::json;
using namespace wcost;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 1;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "JSON configuration file");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "master seed (overrides the configuration)");
  app->add_option("--out", c.out, "output path");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load_with_overrides(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) {
    cfg.seed = c.seed;
    cfg.source["seed"] = *c.seed;
  }
  return cfg;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

json test_json(const TestResult& r) {
  json cv = json::object();
  for (const auto& [q, v] : r.critical_values) cv[std::to_string(q).substr(0, 4)] = v;
  json j{{"statistic", r.statistic},
         {"scaled_statistic", r.scaled_statistic},
         {"scale", r.scale},
         {"p_value", r.p_value},
         {"critical_values", cv},
         {"regime", regime_name(r.regime)},
         {"n", r.n},
         {"n_sim", r.n_sim},
         {"level", r.level},
         {"reject", r.reject},
         {"override_used", r.override_used}};
  if (r.hypotheses) j["hypotheses"] = json::parse(report_json(*r.hypotheses, -1));
  return j;
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

int run_estimate(const Common& c, const std::string& data, const std::string& cost_text) {
  json out;
  if (!data.empty()) {
    const CostSpec cost = cost_text.empty() ? power_cost(1.0) : parse_cost_string(cost_text);
    const PairedSample s = ingest_csv(data);
    out = {{"estimate", w_cost_empirical(s, cost)}, {"n", s.size()}, {"cost", cost.family}, {"source", data}};
    if (cost.power && cost.b_minus == 1.0 && cost.b_plus == 1.0 && cost.L0_minus == 1.0 && cost.L0_plus == 1.0) {
      out["w1_cdf_distance"] = w1_cdf_distance(s);
    }
  } else {
    if (c.config.empty()) throw ValidationError("estimate needs --data or --config");
    ExperimentConfig cfg = load_with_overrides(c);
    if (!cost_text.empty()) cfg.cost = parse_cost_string(cost_text);
    const PopulationValue v = w_cost_population(cfg.pair, cfg.cost);
    out = {{"population_value", v.value}, {"interior", v.interior},    {"tail_lower", v.tail_lower},
           {"tail_upper", v.tail_upper},  {"quad_error", v.quad_error}, {"delta", v.delta}};
    if (cfg.seed) {
      const PairedSample s = sample_pairs(cfg.pair, cfg.n, *cfg.seed);
      out["sample_estimate"] = w_cost_empirical(s, cfg.cost);
      out["n"] = cfg.n;
      out["seed"] = *cfg.seed;
    }
  }
  write_or_print(c.out, out.dump(2) + "\n");
  return 0;
}

struct TestArgs {
  std::string data;
  std::string null_ref;
  std::string cost = "power:1";
  double level = 0.05;
  std::size_t nsim = 5000;
  double p = 1.0;
  std::size_t m = 2047;
  double delta = 1e-4;
  bool override_checks = false;
  std::string truncation = "error";
};

int run_test(const Common& c, const TestArgs& a) {
  if (!c.seed) throw ValidationError("test needs --seed; there is no clock-based default");
  const json ref = load_json_file(a.null_ref);
  SimulationSpec sim;
  sim.grid.m = a.m;
  sim.grid.delta = a.delta;
  sim.draws.n_sim = a.nsim;
  sim.draws.seed = *c.seed;
  sim.draws.threads = c.threads;
  sim.draws.truncation = a.truncation == "warn" ? TruncationPolicy::warn : TruncationPolicy::error;
  HypothesisPolicy policy;
  policy.override_checks = a.override_checks;

  PairSpec null_pair;
  if (ref.contains("pair")) {
    null_pair = parse_pair(ref.at("pair"));
  } else {
    const DistSpec d = parse_distribution(ref);
    null_pair = {d, d, CouplingSpec::independent(), Partition::whole(Region::E)};
  }

  const std::string text = [&] {
    std::ifstream in(a.data, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + a.data + "'");
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  const auto rows = parse_numeric_csv(text, a.data);
  if (rows.empty()) throw ValidationError(a.data + ": no data rows");
  TestResult r;
  if (rows.front().size() == 1) {
    std::vector<double> xs;
    for (const auto& row : rows) xs.push_back(row[0]);
    r = gof_test(xs, null_pair.x, a.p, a.level, sim, policy);
  } else {
    r = two_sample_test(parse_pairs_csv(text, a.data), null_pair, parse_cost_string(a.cost), a.level, sim, policy);
  }
  write_or_print(c.out, test_json(r).dump(2) + "\n");
  return 0;
}

int run_check(const Common& c, bool json_only) {
  const ExperimentConfig cfg = load_with_overrides(c);
  const bool one_sample = cfg.regime == Regime::one_sample;
  const CheckReport report = one_sample ? check_one_sample(cfg.pair.x, cfg.p) : check_for_regime(cfg.pair, cfg.cost);
  const std::string j = report_json(report) + "\n";
  if (!json_only) std::cout << report_table(report);
  if (!c.out.empty()) {
    write_text_file(c.out, j);
  } else if (json_only) {
    std::cout << j;
  }
  if (report.verdict == Verdict::fail) {
    std::cerr << "error: hypothesis check failed: " << report.first_problem() << "\n";
    return 4;
  }
  return 0;
}

int run_simulate(const Common& c, std::optional<std::size_t> nsim) {
  ExperimentConfig cfg = load_with_overrides(c);
  if (!cfg.seed) throw ValidationError("simulate-limit needs a seed (config or --seed)");
  DrawOptions opt;
  opt.n_sim = nsim.value_or(cfg.n_sim);
  opt.seed = *cfg.seed;
  opt.threads = c.threads;
  opt.truncation = cfg.truncation;
  LimitDraws d;
  if (cfg.regime == Regime::one_sample) {
    const PairSpec single{cfg.pair.x, cfg.pair.x, CouplingSpec::independent(), Partition::whole(Region::E)};
    d = draw_limit_one_sample(cfg.pair.x, cfg.p, build_bridge_grid(single, cfg.grid), opt);
  } else {
    d = draw_limit(cfg.pair, cfg.cost, build_bridge_grid(cfg.pair, cfg.grid), opt);
  }
  json meta{{"regime", regime_name(d.regime)},
            {"n_sim", d.values.size()},
            {"seed", d.seed},
            {"grid", {{"m", d.grid.m}, {"delta", d.grid.delta}}},
            {"jitter", d.jitter},
            {"factor_residual", d.factor_residual},
            {"tail_bound", d.tail_bound},
            {"median_abs", d.median_abs},
            {"config", resolved_config(cfg)}};
  std::string csv = "value\n";
  for (const double v : d.values) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    csv.append(buf, res.ptr);
    csv += '\n';
  }
  if (c.out.empty()) {
    std::cout << csv;
    std::cerr << meta.dump(2) << "\n";
  } else {
    write_text_file(c.out, csv);
    write_text_file(sidecar_path(c.out), meta.dump(2) + "\n");
  }
  return 0;
}

int run_study(const Common& c) {
  const ExperimentConfig cfg = load_with_overrides(c);
  const StudyResult r = run_clt_study(cfg, c.threads);
  std::string stats = cfg.statistics_path, meta = cfg.metadata_path;
  if (!c.out.empty()) {
    stats = c.out + ".csv";
    meta = c.out + ".json";
  }
  emit(r, stats, meta);
  json brief{{"regime", regime_name(r.regime)},
             {"replications", r.statistics.size()},
             {"n_sim", r.draws.values.size()},
             {"ks", r.ks},
             {"statistics_mean", r.statistics_summary.mean},
             {"draws_mean", r.draws_summary.mean},
             {"runtime_seconds", r.runtime_seconds}};
  std::cout << brief.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein-cost contrasts between one-dimensional distributions"};
  app.require_subcommand(1);

  Common est_c, test_c, check_c, sim_c, study_c;
  std::string est_data, est_cost;
  auto* est = app.add_subcommand("estimate", "empirical or population W_c");
  add_common(est, est_c, false);
  est->add_option("--data", est_data, "two-column CSV of paired observations");
  est->add_option("--cost", est_cost, "cost, e.g. power:1.5, pinball:0.3, asymmetric:1,2,1.5,1.5");

  TestArgs ta;
  auto* test = app.add_subcommand("test", "two-sample or goodness-of-fit test with simulated critical values");
  add_common(test, test_c, false);
  test->add_option("--data", ta.data, "CSV: two columns for a two-sample test, one for goodness of fit")->required();
  test->add_option("--null", ta.null_ref, "JSON null: a distribution object or a config with 'pair'")->required();
  test->add_option("--cost", ta.cost, "cost for the two-sample statistic");
  test->add_option("--level", ta.level, "test level")->check(CLI::Range(0.0, 1.0));
  test->add_option("--nsim", ta.nsim, "number of limit draws")->check(CLI::PositiveNumber);
  test->add_option("--p", ta.p, "exponent for the one-sample W_p^p statistic");
  test->add_option("--m", ta.m, "bridge grid size")->check(CLI::PositiveNumber);
  test->add_option("--delta", ta.delta, "grid truncation");
  test->add_option("--truncation", ta.truncation, "error or warn")->check(CLI::IsMember({"error", "warn"}));
  test->add_flag("--override-checks", ta.override_checks, "run even when a hypothesis check fails");

  bool check_json = false;
  auto* check = app.add_subcommand("check", "hypothesis checks for a configuration");
  add_common(check, check_c, true);
  check->add_flag("--json", check_json, "print only the JSON report");

  std::optional<std::size_t> sim_nsim;
  auto* sim = app.add_subcommand("simulate-limit", "draws of the limiting random variable");
  add_common(sim, sim_c, true);
  sim->add_option("--nsim", sim_nsim, "number of draws (overrides the configuration)");

  auto* study = app.add_subcommand("study", "Monte Carlo study of the scaled statistic against its limit");
  add_common(study, study_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*est) return run_estimate(est_c, est_data, est_cost);
    if (*test) return run_test(test_c, ta);
    if (*check) return run_check(check_c, check_json);
    if (*sim) return run_simulate(sim_c, sim_nsim);
    if (*study) return run_study(study_c);
  } catch (const HypothesisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
