#include "wcost/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wcost/error.hpp"

namespace wcost {
namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
}

void expect_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  expect_object(j, where);
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ValidationError(where + ": unknown key '" + k + "'");
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::size_t count_or(const json& j, const std::string& key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw ValidationError(where + ": '" + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) throw ValidationError(where + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

DistSpec parse_distribution(const json& j) {
  const std::string where = "distribution";
  expect_object(j, where);
  const std::string family = text(j, "family", where);
  const std::string w = where + " '" + family + "'";
  if (family == "gaussian") {
    expect_keys(j, {"family", "mean", "sd"}, w);
    return gaussian(number_or(j, "mean", 0.0, w), number_or(j, "sd", 1.0, w));
  }
  if (family == "exponential") {
    expect_keys(j, {"family", "rate"}, w);
    return exponential(number_or(j, "rate", 1.0, w));
  }
  if (family == "pareto") {
    expect_keys(j, {"family", "index", "scale"}, w);
    return pareto(number(j, "index", w), number_or(j, "scale", 1.0, w));
  }
  if (family == "weibull") {
    expect_keys(j, {"family", "shape", "scale"}, w);
    return weibull(number(j, "shape", w), number_or(j, "scale", 1.0, w));
  }
  if (family == "beta") {
    expect_keys(j, {"family", "a", "b"}, w);
    return beta(number(j, "a", w), number(j, "b", w));
  }
  if (family == "uniform") {
    expect_keys(j, {"family", "lo", "hi"}, w);
    return uniform(number_or(j, "lo", 0.0, w), number_or(j, "hi", 1.0, w));
  }
  if (family == "log_tail") {
    expect_keys(j, {"family", "w"}, w);
    return log_tail(number(j, "w", w));
  }
  if (family == "quantile_tent") {
    expect_keys(j, {"family", "base", "lo", "peak", "hi", "height"}, w);
    if (!j.contains("base")) throw ValidationError(w + ": missing 'base'");
    return quantile_tent(parse_distribution(j.at("base")), number(j, "lo", w), number(j, "peak", w),
                         number(j, "hi", w), number(j, "height", w));
  }
  throw ValidationError("unknown distribution family '" + family + "'");
}

CouplingSpec parse_coupling(const json& j) {
  const std::string where = "coupling";
  expect_keys(j, {"kind", "rho"}, where);
  const std::string kind = text(j, "kind", where);
  if (kind == "independent") return CouplingSpec::independent();
  if (kind == "comonotone") return CouplingSpec::comonotone();
  if (kind == "gaussian") return CouplingSpec::gaussian(number(j, "rho", where));
  throw ValidationError("unknown coupling kind '" + kind + "'");
}

Partition parse_partition(const json& j) {
  const std::string where = "partition";
  expect_keys(j, {"breaks", "labels"}, where);
  if (!j.contains("breaks") || !j.at("breaks").is_array() || !j.contains("labels") || !j.at("labels").is_array()) {
    throw ValidationError(where + ": needs arrays 'breaks' and 'labels'");
  }
  Partition p;
  p.breaks.clear();
  p.labels.clear();
  for (const auto& b : j.at("breaks")) {
    if (!b.is_number()) throw ValidationError(where + ": breaks must be numbers");
    p.breaks.push_back(b.get<double>());
  }
  for (const auto& l : j.at("labels")) {
    const std::string s = l.is_string() ? l.get<std::string>() : "";
    if (s == "E") {
      p.labels.push_back(Region::E);
    } else if (s == "D") {
      p.labels.push_back(Region::D);
    } else {
      throw ValidationError(where + ": labels must be \"E\" or \"D\"");
    }
  }
  if (p.breaks.size() != p.labels.size() + 1 || p.breaks.front() != 0.0 || p.breaks.back() != 1.0) {
    throw ValidationError(where + ": breaks must run from 0 to 1 with one more entry than labels");
  }
  for (std::size_t i = 0; i + 1 < p.breaks.size(); ++i) {
    if (!(p.breaks[i] < p.breaks[i + 1])) throw ValidationError(where + ": breaks must be strictly increasing");
  }
  return p;
}

CostSpec parse_cost(const json& j) {
  const std::string where = "cost";
  expect_object(j, where);
  const std::string family = text(j, "family", where);
  if (family == "power") {
    expect_keys(j, {"family", "p"}, where);
    return power_cost(number(j, "p", where));
  }
  if (family == "pinball") {
    expect_keys(j, {"family", "alpha"}, where);
    return pinball_cost(number(j, "alpha", where));
  }
  if (family == "asymmetric_power") {
    expect_keys(j, {"family", "a_minus", "a_plus", "b_minus", "b_plus"}, where);
    return asymmetric_power_cost(number_or(j, "a_minus", 1.0, where), number_or(j, "a_plus", 1.0, where),
                                 number(j, "b_minus", where), number(j, "b_plus", where));
  }
  throw ValidationError("unknown cost family '" + family + "'");
}

CostSpec parse_cost_string(const std::string& s) {
  const auto colon = s.find(':');
  const std::string family = s.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(s.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ValidationError("cost '" + s + "': '" + item + "' is not a number");
      }
    }
  }
  const auto need = [&](std::size_t k) {
    if (args.size() != k) {
      throw ValidationError("cost '" + s + "': expected " + std::to_string(k) + " numeric argument(s)");
    }
  };
  if (family == "power") {
    need(1);
    return power_cost(args[0]);
  }
  if (family == "pinball") {
    need(1);
    return pinball_cost(args[0]);
  }
  if (family == "asymmetric" || family == "asymmetric_power") {
    need(4);
    return asymmetric_power_cost(args[0], args[1], args[2], args[3]);
  }
  throw ValidationError("unknown cost '" + s + "' (use power:p, pinball:alpha or asymmetric:a-,a+,b-,b+)");
}

PairSpec parse_pair(const json& j) {
  const std::string where = "pair";
  expect_keys(j, {"x", "y", "coupling", "partition"}, where);
  if (!j.contains("x")) throw ValidationError(where + ": missing 'x'");
  PairSpec pair;
  pair.x = parse_distribution(j.at("x"));
  const bool same = !j.contains("y") || j.at("y") == j.at("x");
  pair.y = j.contains("y") ? parse_distribution(j.at("y")) : pair.x;
  pair.coupling = j.contains("coupling") ? parse_coupling(j.at("coupling")) : CouplingSpec::independent();
  if (j.contains("partition")) {
    pair.partition = parse_partition(j.at("partition"));
  } else {
    pair.partition = Partition::whole(same ? Region::E : Region::D);
  }
  verify_partition(pair);
  return pair;
}

ExperimentConfig parse_config(const json& j) {
  const std::string where = "config";
  expect_keys(j,
              {"pair", "cost", "regime", "n", "replications", "n_sim", "seed", "grid", "p", "truncation",
               "override_checks", "outputs"},
              where);
  ExperimentConfig cfg;
  try {
    if (!j.contains("pair")) throw ValidationError(where + ": missing 'pair'");
    cfg.pair = parse_pair(j.at("pair"));
    cfg.cost = j.contains("cost") ? parse_cost(j.at("cost")) : power_cost(1.0);
    if (j.contains("regime")) {
      const std::string r = text(j, "regime", where);
      if (r != "auto") cfg.regime = parse_regime(r);
    }
    cfg.n = count_or(j, "n", cfg.n, where);
    cfg.replications = count_or(j, "replications", cfg.replications, where);
    cfg.n_sim = count_or(j, "n_sim", cfg.n_sim, where);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ValidationError(where + ": 'seed' must be a non-negative integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      expect_keys(g, {"m", "delta", "spacing"}, "grid");
      cfg.grid.m = count_or(g, "m", cfg.grid.m, "grid");
      cfg.grid.delta = number_or(g, "delta", cfg.grid.delta, "grid");
      if (g.contains("spacing")) {
        const std::string s = text(g, "spacing", "grid");
        if (s == "logit") {
          cfg.grid.spacing = GridSpacing::logit;
        } else if (s != "equispaced") {
          throw ValidationError("grid: spacing must be \"equispaced\" or \"logit\"");
        }
      }
    }
    cfg.p = number_or(j, "p", cfg.cost.b(), where);
    if (j.contains("truncation")) {
      const std::string t = text(j, "truncation", where);
      if (t == "warn") {
        cfg.truncation = TruncationPolicy::warn;
      } else if (t != "error") {
        throw ValidationError(where + ": truncation must be \"error\" or \"warn\"");
      }
    }
    if (j.contains("override_checks")) {
      if (!j.at("override_checks").is_boolean()) throw ValidationError(where + ": 'override_checks' must be a boolean");
      cfg.override_checks = j.at("override_checks").get<bool>();
    }
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      expect_keys(o, {"statistics", "metadata"}, "outputs");
      if (o.contains("statistics")) cfg.statistics_path = text(o, "statistics", "outputs");
      if (o.contains("metadata")) cfg.metadata_path = text(o, "metadata", "outputs");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.source = j;
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(load_json_file(path)); }

json resolved_config(const ExperimentConfig& cfg) {
  json j = cfg.source;
  json& pair = j["pair"];
  if (!pair.contains("y")) pair["y"] = pair["x"];
  if (!pair.contains("coupling")) pair["coupling"] = {{"kind", "independent"}};
  if (!pair.contains("partition")) {
    json labels = json::array();
    for (const Region r : cfg.pair.partition.labels) labels.push_back(r == Region::E ? "E" : "D");
    pair["partition"] = {{"breaks", cfg.pair.partition.breaks}, {"labels", labels}};
  }
  if (!j.contains("cost")) j["cost"] = {{"family", "power"}, {"p", 1.0}};
  j["regime"] = cfg.regime ? regime_name(*cfg.regime) : std::string("auto");
  j["n"] = cfg.n;
  j["replications"] = cfg.replications;
  j["n_sim"] = cfg.n_sim;
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["grid"] = {{"m", cfg.grid.m},
               {"delta", cfg.grid.delta},
               {"spacing", cfg.grid.spacing == GridSpacing::logit ? "logit" : "equispaced"}};
  j["p"] = cfg.p;
  j["truncation"] = cfg.truncation == TruncationPolicy::warn ? "warn" : "error";
  j["override_checks"] = cfg.override_checks;
  return j;
}

}  // namespace wcost
