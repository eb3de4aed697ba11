#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "wcost/costs.hpp"
#include "wcost/limitlaw.hpp"
#include "wcost/pair.hpp"

namespace wcost {

/// A study or command configuration read from JSON.
///
///   {
///     "pair":   {"x": {"family": "gaussian", "mean": 0, "sd": 1},
///                "y": {...},                        // defaults to x
///                "coupling": {"kind": "independent"},
///                "partition": {"breaks": [0, 1], "labels": ["E"]}},
///     "cost":   {"family": "power", "p": 1.5},
///     "regime": "auto",
///     "n": 2000, "replications": 1000, "n_sim": 5000, "seed": 1,
///     "grid":   {"m": 2047, "delta": 1e-4, "spacing": "equispaced"},
///     "p": 1.5,                                     // one-sample exponent
///     "truncation": "error", "override_checks": false,
///     "outputs": {"statistics": "stats.csv", "metadata": "study.json"}
///   }
///
/// The partition defaults to E = (0,1) when y is absent or identical to x and
/// to D = (0,1) otherwise. The seed has no default.
struct ExperimentConfig {
  PairSpec pair;
  CostSpec cost;
  std::optional<Regime> regime;  ///< empty means chosen from the pair and cost
  std::size_t n = 2000;
  std::size_t replications = 1000;
  std::size_t n_sim = 5000;
  std::optional<std::uint64_t> seed;
  GridSpec grid;
  double p = 1.0;
  TruncationPolicy truncation = TruncationPolicy::error;
  bool override_checks = false;
  std::string statistics_path;
  std::string metadata_path;
  nlohmann::json source;  ///< the resolved configuration, embedded in outputs
};

DistSpec parse_distribution(const nlohmann::json& j);
CouplingSpec parse_coupling(const nlohmann::json& j);
Partition parse_partition(const nlohmann::json& j);
CostSpec parse_cost(const nlohmann::json& j);
/// Short textual costs for the command line: "power:1.5", "pinball:0.3",
/// "asymmetric:a_minus,a_plus,b_minus,b_plus".
CostSpec parse_cost_string(const std::string& text);
PairSpec parse_pair(const nlohmann::json& j);

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json load_json_file(const std::string& path);

/// The configuration with defaults filled in, as written into study outputs.
nlohmann::json resolved_config(const ExperimentConfig& cfg);

}  // namespace wcost
