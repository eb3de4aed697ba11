#pragma once

#include <map>
#include <string>
#include <vector>

#include "wcost/costs.hpp"
#include "wcost/distributions.hpp"
#include "wcost/pair.hpp"

namespace wcost {

/// not_applicable marks a condition that is vacuous for the inputs, such as a
/// tail condition on a bounded tail.
enum class Verdict { pass, fail, inconclusive, not_applicable };

std::string verdict_name(Verdict v);

struct MarginPoint {
  double point = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs; negative means the inequality is violated at the probe
};

struct CheckReport {
  std::string condition;
  Verdict verdict = Verdict::pass;
  std::vector<MarginPoint> margins;
  std::map<std::string, double> parameters;
  std::vector<std::string> notes;
  std::vector<CheckReport> children;

  bool ok() const noexcept { return verdict == Verdict::pass || verdict == Verdict::not_applicable; }
  /// Label of the first failing or inconclusive leaf, or the own label.
  std::string first_problem() const;
};

/// Window for asymptotic "for all y > y0" inequalities. The verdict uses the
/// last decade of probes: margins are extrapolated one further decade on a
/// log-y scale and the sign of that extrapolation decides between pass/fail
/// and inconclusive.
struct AsymptoticWindow {
  double y0 = 1e5;
  double y_max = 1e6;
  int probes = 200;
};

struct CfgParams {
  double theta2 = 0.5;
  double theta_minus = 1.5;
  double theta_plus = 1.5;
  AsymptoticWindow window;
  AsymptoticWindow derivative_window{10.0, 1e3, 200};
  double fd_step = 1e-5;  ///< relative finite-difference step
};

/// Verdict from margins on an increasing abscissa, using the extrapolation rule above.
Verdict asymptotic_verdict(const std::vector<MarginPoint>& margins);

/// sup min(u,1-u)|(log h)'(u)| and sup min(u,1-u)/((|F^{-1}(u)|+1) h(u)).
CheckReport check_fg(const DistSpec& dist, double fd_step = 1e-5);

/// F = G tail compatibility on the four (l, psi_X) combinations. Requires b < 2.
CheckReport check_cfg_e(const DistSpec& dist, const CostSpec& cost, const CfgParams& params = {});

/// F != G tail compatibility: derivative condition on X and Y tails, plus the
/// integrated condition at tails where |F^{-1} - G^{-1}| approaches 0.
CheckReport check_cfg_d(const PairSpec& pair, const CostSpec& cost, const CfgParams& params = {});

/// Mixed partitions: CFG_D always, CFG_E on each outer interval lying in E.
CheckReport check_cfg_ed(const PairSpec& pair, const CostSpec& cost, const CfgParams& params = {});

/// lim u/h = lim (1-u)/h = 0 and finiteness of int u(1-u)/h^2.
CheckReport check_w2_hypotheses(const DistSpec& dist);

/// int (sqrt(u(1-u))/h)^{b'} < inf for a bounded support with b' > max(b_-, b_+).
CheckReport check_compact(const DistSpec& dist, const CostSpec& cost, double b_prime);

/// Structural cost checks as a report.
CheckReport check_cost(const CostSpec& cost);

/// Tail check for the one-sample limit: lighter than a Pareto tail of index
/// 2(p+2)/(2-p), expressed through the same window as check_cfg_e.
CheckReport check_one_sample(const DistSpec& dist, double p, const CfgParams& params = {});

/// Runs the checks the selected regime relies on.
CheckReport check_for_regime(const PairSpec& pair, const CostSpec& cost, const CfgParams& params = {});

std::string report_json(const CheckReport& report, int indent = 2);
std::string report_table(const CheckReport& report);

}  // namespace wcost
