#include "wcost/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "wcost/error.hpp"
#include "wcost/estimator.hpp"
#include "wcost/inference.hpp"
#include "wcost/kernels.hpp"
#include "wcost/rng.hpp"

namespace wcost {
namespace {

constexpr std::uint64_t kDrawStream = ~std::uint64_t{0};

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double quantile_sorted(const std::vector<double>& s, double prob) {
  const double pos = prob * static_cast<double>(s.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(k);
  return k + 1 < s.size() ? s[k] + frac * (s[k + 1] - s[k]) : s.back();
}

nlohmann::json summary_json(const DrawSummary& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"q05", s.q05}, {"q95", s.q95}};
}

Regime resolve_regime(const ExperimentConfig& cfg) {
  if (cfg.regime == Regime::one_sample) return Regime::one_sample;
  const Regime selected = select_regime(cfg.pair, cfg.cost);
  if (cfg.regime && *cfg.regime != selected) {
    throw ValidationError("configured regime '" + regime_name(*cfg.regime) + "' does not match '" +
                          regime_name(selected) + "' implied by the pair and cost");
  }
  return selected;
}

}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS distance needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_uniform(std::span<const double> a) {
  if (a.empty()) throw ValidationError("KS distance needs a non-empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::clamp(x[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

DrawSummary summarize(std::span<const double> values) {
  DrawSummary s;
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (const double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.median = quantile_sorted(v, 0.5);
  s.q05 = quantile_sorted(v, 0.05);
  s.q95 = quantile_sorted(v, 0.95);
  return s;
}

std::vector<double> replicate_statistics(const ExperimentConfig& cfg, Regime regime, double scale, double center,
                                         unsigned threads) {
  if (!cfg.seed) throw ValidationError("a seed is required; there is no clock-based default");
  const std::uint64_t seed = *cfg.seed;
  std::vector<double> out(cfg.replications);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= cfg.replications) break;
      const PairedSample s = sample_pairs(cfg.pair, cfg.n, derive_seed(seed, r));
      const double stat = regime == Regime::one_sample ? wp_one_sample(s.sorted_xs(), cfg.pair.x, cfg.p)
                                                       : w_cost_empirical(s, cfg.cost);
      out[r] = scale * (stat - center);
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.replications)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

StudyResult run_clt_study(const ExperimentConfig& cfg, unsigned threads) {
  if (!cfg.seed) throw ValidationError("a seed is required; there is no clock-based default");
  const auto start = std::chrono::steady_clock::now();
  StudyResult res;
  res.threads = threads;
  res.config = resolved_config(cfg);
  res.regime = resolve_regime(cfg);

  CheckReport report = res.regime == Regime::one_sample ? check_one_sample(cfg.pair.x, cfg.p)
                                                        : check_for_regime(cfg.pair, cfg.cost);
  if (report.verdict == Verdict::fail) {
    if (!cfg.override_checks) {
      throw HypothesisError(report.first_problem(),
                            "hypothesis check failed: " + report.first_problem() + "\n" + report_table(report));
    }
    res.override_used = true;
    warn("hypothesis check " + report.first_problem() + " failed; continuing because checks are overridden");
  } else if (report.verdict == Verdict::inconclusive) {
    warn("hypothesis check " + report.first_problem() + " is inconclusive on the probe window");
  }
  res.hypotheses = std::move(report);

  if (res.regime == Regime::distinct || res.regime == Regime::mixed) {
    res.center = w_cost_population(cfg.pair, cfg.cost).value;
  }
  res.scale = regime_scale(res.regime, cfg.cost, cfg.n, cfg.p);

  DrawOptions opt;
  opt.n_sim = cfg.n_sim;
  opt.seed = derive_seed(*cfg.seed, kDrawStream);
  opt.threads = threads;
  opt.truncation = cfg.truncation;
  if (res.regime == Regime::one_sample) {
    const PairSpec single{cfg.pair.x, cfg.pair.x, CouplingSpec::independent(), Partition::whole(Region::E)};
    res.draws = draw_limit_one_sample(cfg.pair.x, cfg.p, build_bridge_grid(single, cfg.grid), opt);
  } else {
    res.draws = draw_limit(cfg.pair, cfg.cost, build_bridge_grid(cfg.pair, cfg.grid), opt);
  }

  res.statistics = replicate_statistics(cfg, res.regime, res.scale, res.center, threads);
  res.statistics_summary = summarize(res.statistics);
  res.draws_summary = summarize(res.draws.values);
  res.ks = ks_two_sample(res.statistics, res.draws.values);
  res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::string statistics_csv(std::span<const double> values, const std::string& header) {
  std::string out = header + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += shortest(values[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json environment_fingerprint(unsigned threads) {
  nlohmann::json j;
  j["isa"] = std::string(kernels::isa_name(kernels::active_isa()));
  j["threads"] = threads;
  j["hardware_threads"] = std::thread::hardware_concurrency();
#if defined(__VERSION__)
  j["compiler"] = __VERSION__;
#endif
  j["cxx_standard"] = static_cast<long>(__cplusplus);
  return j;
}

nlohmann::json study_json(const StudyResult& r) {
  nlohmann::json j;
  j["config"] = r.config;
  j["regime"] = regime_name(r.regime);
  j["scale"] = r.scale;
  j["center"] = r.center;
  j["replications"] = r.statistics.size();
  j["statistics_summary"] = summary_json(r.statistics_summary);
  j["limit"] = {{"n_sim", r.draws.values.size()},
                {"seed", r.draws.seed},
                {"grid", {{"m", r.draws.grid.m}, {"delta", r.draws.grid.delta}}},
                {"jitter", r.draws.jitter},
                {"factor_residual", r.draws.factor_residual},
                {"tail_bound", r.draws.tail_bound},
                {"median_abs", r.draws.median_abs},
                {"summary", summary_json(r.draws_summary)}};
  j["ks"] = r.ks;
  if (r.hypotheses) j["hypotheses"] = nlohmann::json::parse(report_json(*r.hypotheses, -1));
  j["override_used"] = r.override_used;
  j["runtime_seconds"] = r.runtime_seconds;
  j["environment"] = environment_fingerprint(r.threads);
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

void emit(const StudyResult& result, const std::string& statistics_path, const std::string& metadata_path) {
  if (!statistics_path.empty()) write_text_file(statistics_path, statistics_csv(result.statistics));
  if (!metadata_path.empty()) write_text_file(metadata_path, study_json(result).dump(2) + "\n");
}

}  // namespace wcost
