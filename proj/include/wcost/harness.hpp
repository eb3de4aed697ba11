#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wcost/assumptions.hpp"
#include "wcost/config.hpp"
#include "wcost/limitlaw.hpp"

namespace wcost {

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov-Smirnov distance between a sample and Uniform(0,1).
double ks_uniform(std::span<const double> a);

struct DrawSummary {
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

DrawSummary summarize(std::span<const double> values);

struct StudyResult {
  nlohmann::json config;  ///< resolved configuration
  Regime regime = Regime::equal;
  double scale = 1.0;
  double center = 0.0;  ///< W_c(F, G) subtracted before scaling (0 under F = G)
  std::vector<double> statistics;
  LimitDraws draws;
  DrawSummary statistics_summary;
  DrawSummary draws_summary;
  double ks = 0.0;
  std::optional<CheckReport> hypotheses;
  bool override_used = false;
  double runtime_seconds = 0.0;
  unsigned threads = 1;
};

/// R replications of the scaled statistic against N_sim draws of its limit.
/// Deterministic in the configuration and seed for any thread count.
StudyResult run_clt_study(const ExperimentConfig& config, unsigned threads = 1);

/// One scaled statistic per replication index, seeded by derive_seed(seed, r).
std::vector<double> replicate_statistics(const ExperimentConfig& config, Regime regime, double scale, double center,
                                         unsigned threads);

/// Statistics CSV (index, value) with shortest round-trip formatting.
std::string statistics_csv(std::span<const double> values, const std::string& header = "replication,statistic");

nlohmann::json study_json(const StudyResult& result);

/// Writes the statistics CSV and JSON metadata to the configured paths.
void emit(const StudyResult& result, const std::string& statistics_path, const std::string& metadata_path);

/// Library and machine details recorded with every output.
nlohmann::json environment_fingerprint(unsigned threads);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace wcost
