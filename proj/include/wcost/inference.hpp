#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wcost/assumptions.hpp"
#include "wcost/costs.hpp"
#include "wcost/limitlaw.hpp"
#include "wcost/pair.hpp"
#include "wcost/sample.hpp"

namespace wcost {

struct TestResult {
  double statistic = 0.0;
  double scaled_statistic = 0.0;
  double scale = 1.0;
  double p_value = 1.0;
  std::map<double, double> critical_values;  ///< upper quantile level -> value of the limit law
  Regime regime = Regime::equal;
  std::size_t n = 0;
  std::size_t n_sim = 0;
  double level = 0.05;
  bool reject = false;
  std::optional<CheckReport> hypotheses;
  bool override_used = false;
};

/// How limit draws are produced when a test has to simulate them.
struct SimulationSpec {
  GridSpec grid;
  DrawOptions draws;
};

/// What to do with the hypothesis checks before a test runs. A failing check
/// throws HypothesisError unless `override_checks` is set; inconclusive checks warn.
struct HypothesisPolicy {
  bool run_checks = true;
  bool override_checks = false;
  CfgParams params;
};

/// Normalization applied to the raw statistic in each regime.
double regime_scale(Regime regime, const CostSpec& cost, std::size_t n, double p = 1.0);

/// Add-one upper-tail p-value (1 + #{draws >= s}) / (1 + N) against sorted draws.
double upper_p_value(std::span<const double> sorted_draws, double s);

/// Upper quantiles (0.90, 0.95, 0.99) of sorted draws.
std::map<double, double> critical_values(std::span<const double> sorted_draws);

/// Two-sample test of F = G with critical values from precomputed draws.
TestResult two_sample_test(const PairedSample& sample, const PairSpec& null_pair, const CostSpec& cost, double level,
                           const LimitDraws& draws);

/// Same test, running the hypothesis checks and simulating (or reusing cached) draws.
TestResult two_sample_test(const PairedSample& sample, const PairSpec& null_pair, const CostSpec& cost, double level,
                           const SimulationSpec& sim, const HypothesisPolicy& policy = {});

/// One-sample goodness-of-fit test of F = null_dist with the W_p^p statistic, 1 <= p < 2.
TestResult gof_test(std::span<const double> xs, const DistSpec& null_dist, double p, double level,
                    const SimulationSpec& sim, const HypothesisPolicy& policy = {});

/// Limit law of sqrt(n)(W_c(F_n, G_n) - W_c(F, G)) under a fixed alternative:
/// Gaussian with variance sigma2 when the E terms vanish, simulated draws otherwise.
struct AlternativeLaw {
  Regime regime = Regime::distinct;
  std::optional<Sigma2Result> sigma2;
  std::optional<LimitDraws> draws;
};

AlternativeLaw clt_alternative_distribution(const PairSpec& pair, const CostSpec& cost, const SimulationSpec& sim,
                                            const HypothesisPolicy& policy = {});

struct ConfidenceInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
};

/// Interval for W_c(F, G) from the alternative limit law at the sample size of `sample`.
ConfidenceInterval clt_confidence_interval(const PairedSample& sample, const AlternativeLaw& law,
                                           const CostSpec& cost, double level = 0.95);

/// Process-wide cache of limit draws keyed by a fingerprint of everything that determines them.
std::shared_ptr<const LimitDraws> cached_limit_draws(const PairSpec& pair, const CostSpec& cost,
                                                     const SimulationSpec& sim);
/// Empty string when an input is user-defined and cannot be fingerprinted.
std::string limit_fingerprint(const PairSpec& pair, const CostSpec& cost, const SimulationSpec& sim);
void clear_limit_cache();

}  // namespace wcost
