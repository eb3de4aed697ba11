#include "wcost/inference.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "wcost/error.hpp"
#include "wcost/estimator.hpp"
#include "wcost/special.hpp"

namespace wcost {
namespace {

const std::vector<std::string> kBuiltinFamilies = {"gaussian", "exponential", "pareto", "weibull",
                                                   "beta",     "uniform",     "log_tail"};

bool builtin_family(const std::string& family) {
  std::string f = family;
  while (f.rfind("quantile_tent(", 0) == 0) f = f.substr(14, f.size() - 15);
  return std::find(kBuiltinFamilies.begin(), kBuiltinFamilies.end(), f) != kBuiltinFamilies.end();
}

void print_dist(std::ostringstream& os, const DistSpec& d) {
  os << d.family() << '{';
  for (const auto& [k, v] : d.params()) os << k << '=' << v << ';';
  os << '}';
}

void enforce(const CheckReport& report, const HypothesisPolicy& policy) {
  if (report.verdict == Verdict::fail) {
    if (policy.override_checks) {
      warn("hypothesis check " + report.first_problem() + " failed; continuing because checks are overridden");
      return;
    }
    throw HypothesisError(report.first_problem(),
                          "hypothesis check failed: " + report.first_problem() + "\n" + report_table(report));
  }
  if (report.verdict == Verdict::inconclusive) {
    warn("hypothesis check " + report.first_problem() + " is inconclusive on the probe window");
  }
}

std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  return s;
}

TestResult finish_test(double statistic, double scale, std::size_t n, double level, const LimitDraws& draws) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("test level must lie in (0, 1)");
  TestResult r;
  r.statistic = statistic;
  r.scale = scale;
  r.scaled_statistic = scale * statistic;
  r.n = n;
  r.level = level;
  r.regime = draws.regime;
  r.n_sim = draws.values.size();
  const std::vector<double> sorted = sorted_copy(draws.values);
  r.p_value = upper_p_value(sorted, r.scaled_statistic);
  r.critical_values = critical_values(sorted);
  r.reject = r.p_value <= level;
  return r;
}

std::mutex g_cache_mutex;
std::unordered_map<std::string, std::shared_ptr<const LimitDraws>> g_cache;

}  // namespace

double regime_scale(Regime regime, const CostSpec& cost, std::size_t n, double p) {
  const auto nn = static_cast<double>(n);
  switch (regime) {
    case Regime::equal:
    case Regime::compact:
    case Regime::quadratic:
      return rate_vn(cost, static_cast<std::int64_t>(n));
    case Regime::distinct:
    case Regime::mixed:
      return std::sqrt(nn);
    case Regime::one_sample:
      return std::pow(nn, 0.5 * p);
  }
  return 1.0;
}

double upper_p_value(std::span<const double> sorted_draws, double s) {
  const auto it = std::lower_bound(sorted_draws.begin(), sorted_draws.end(), s);
  const auto exceed = static_cast<double>(sorted_draws.end() - it);
  return (1.0 + exceed) / (1.0 + static_cast<double>(sorted_draws.size()));
}

std::map<double, double> critical_values(std::span<const double> sorted_draws) {
  std::map<double, double> out;
  if (sorted_draws.empty()) return out;
  for (const double level : {0.90, 0.95, 0.99}) {
    const auto n = static_cast<double>(sorted_draws.size());
    const auto k = static_cast<std::size_t>(std::min(n - 1.0, std::ceil(level * n) - 1.0));
    out[level] = sorted_draws[k];
  }
  return out;
}

std::string limit_fingerprint(const PairSpec& pair, const CostSpec& cost, const SimulationSpec& sim) {
  if (!builtin_family(pair.x.family()) || !builtin_family(pair.y.family())) return {};
  if (pair.coupling.kind() == CouplingKind::custom || !cost.power) return {};
  std::ostringstream os;
  os.precision(17);
  print_dist(os, pair.x);
  print_dist(os, pair.y);
  os << pair.coupling.name() << '(' << pair.coupling.rho() << ')' << pair.partition.describe();
  const auto& pc = *cost.power;
  os << "|cost:" << pc.coef_minus << ',' << pc.coef_plus << ',' << pc.exp_minus << ',' << pc.exp_plus;
  os << "|grid:" << sim.grid.m << ',' << sim.grid.delta << ',' << static_cast<int>(sim.grid.spacing);
  os << "|draws:" << sim.draws.n_sim << ',' << sim.draws.seed << ',' << static_cast<int>(sim.draws.truncation);
  return os.str();
}

std::shared_ptr<const LimitDraws> cached_limit_draws(const PairSpec& pair, const CostSpec& cost,
                                                     const SimulationSpec& sim) {
  const std::string key = limit_fingerprint(pair, cost, sim);
  if (!key.empty()) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    const auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second;
  }
  const BridgeGrid grid = build_bridge_grid(pair, sim.grid);
  auto draws = std::make_shared<const LimitDraws>(draw_limit(pair, cost, grid, sim.draws));
  if (!key.empty()) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_cache.emplace(key, draws);
  }
  return draws;
}

void clear_limit_cache() {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  g_cache.clear();
}

TestResult two_sample_test(const PairedSample& sample, const PairSpec& null_pair, const CostSpec& cost, double level,
                           const LimitDraws& draws) {
  if (!null_pair.partition.all(Region::E)) {
    throw ValidationError("two-sample null needs F = G, i.e. a partition with E = (0,1)");
  }
  if (sample.size() == 0) throw ValidationError("two-sample test on an empty sample");
  const double stat = w_cost_empirical(sample, cost);
  const double scale = regime_scale(draws.regime, cost, sample.size());
  return finish_test(stat, scale, sample.size(), level, draws);
}

TestResult two_sample_test(const PairedSample& sample, const PairSpec& null_pair, const CostSpec& cost, double level,
                           const SimulationSpec& sim, const HypothesisPolicy& policy) {
  if (!null_pair.partition.all(Region::E)) {
    throw ValidationError("two-sample null needs F = G, i.e. a partition with E = (0,1)");
  }
  std::optional<CheckReport> report;
  if (policy.run_checks) {
    report = check_for_regime(null_pair, cost, policy.params);
    enforce(*report, policy);
  }
  const auto draws = cached_limit_draws(null_pair, cost, sim);
  TestResult r = two_sample_test(sample, null_pair, cost, level, *draws);
  r.hypotheses = std::move(report);
  r.override_used = policy.override_checks && r.hypotheses && r.hypotheses->verdict == Verdict::fail;
  return r;
}

TestResult gof_test(std::span<const double> xs, const DistSpec& null_dist, double p, double level,
                    const SimulationSpec& sim, const HypothesisPolicy& policy) {
  if (!(p >= 1.0 && p < 2.0)) throw ValidationError("goodness-of-fit test needs 1 <= p < 2");
  if (xs.empty()) throw ValidationError("goodness-of-fit test on an empty sample");
  std::optional<CheckReport> report;
  if (policy.run_checks) {
    report = check_one_sample(null_dist, p, policy.params);
    enforce(*report, policy);
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double stat = wp_one_sample(sorted, null_dist, p);

  const PairSpec null_pair{null_dist, null_dist, CouplingSpec::independent(), Partition::whole(Region::E)};
  const BridgeGrid grid = build_bridge_grid(null_pair, sim.grid);
  const LimitDraws draws = draw_limit_one_sample(null_dist, p, grid, sim.draws);
  TestResult r = finish_test(stat, regime_scale(Regime::one_sample, power_cost(p), xs.size(), p), xs.size(), level,
                             draws);
  r.hypotheses = std::move(report);
  r.override_used = policy.override_checks && r.hypotheses && r.hypotheses->verdict == Verdict::fail;
  return r;
}

AlternativeLaw clt_alternative_distribution(const PairSpec& pair, const CostSpec& cost, const SimulationSpec& sim,
                                            const HypothesisPolicy& policy) {
  if (!pair.partition.any(Region::D)) throw ValidationError("alternative limit law needs a non-empty D set");
  const Regime regime = select_regime(pair, cost);
  if (policy.run_checks) enforce(check_cfg_ed(pair, cost, policy.params), policy);
  AlternativeLaw law;
  law.regime = regime;
  // The E terms only survive for branches with b = 1, and only when E is non-empty.
  const bool e_terms = pair.partition.any(Region::E) && (cost.b_minus == 1.0 || cost.b_plus == 1.0);
  if (!e_terms) {
    law.sigma2 = sigma2_D(pair, cost);
  } else {
    const BridgeGrid grid = build_bridge_grid(pair, sim.grid);
    law.draws = draw_limit_ED(pair, cost, grid, sim.draws);
  }
  return law;
}

ConfidenceInterval clt_confidence_interval(const PairedSample& sample, const AlternativeLaw& law,
                                           const CostSpec& cost, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  ConfidenceInterval ci;
  ci.level = level;
  ci.estimate = w_cost_empirical(sample, cost);
  const double root_n = std::sqrt(static_cast<double>(sample.size()));
  const double alpha = 1.0 - level;
  if (law.sigma2) {
    const double half = special::normal_quantile(1.0 - 0.5 * alpha) * std::sqrt(law.sigma2->quadrature) / root_n;
    ci.lower = ci.estimate - half;
    ci.upper = ci.estimate + half;
    return ci;
  }
  if (!law.draws || law.draws->values.empty()) throw ValidationError("alternative limit law carries no draws");
  // sqrt(n)(W_n - W) ~ L, so W lies in [W_n - q_hi / sqrt(n), W_n - q_lo / sqrt(n)].
  const std::vector<double> s = sorted_copy(law.draws->values);
  const auto at = [&](double prob) {
    const double pos = prob * static_cast<double>(s.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    return k + 1 < s.size() ? s[k] + frac * (s[k + 1] - s[k]) : s.back();
  };
  ci.lower = ci.estimate - at(1.0 - 0.5 * alpha) / root_n;
  ci.upper = ci.estimate - at(0.5 * alpha) / root_n;
  return ci;
}

}  // namespace wcost
