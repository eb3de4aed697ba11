#include "wcost/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "wcost/error.hpp"
#include "wcost/limitlaw.hpp"
#include "wcost/quadrature.hpp"

namespace wcost {
namespace {

const char* tail_name(bool upper) { return upper ? "right" : "left"; }
const char* side_name(Side s) { return s == Side::minus ? "l_minus" : "l_plus"; }

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

Verdict combine(const std::vector<CheckReport>& children) {
  bool any_pass = false, any_inconclusive = false;
  for (const auto& c : children) {
    if (c.verdict == Verdict::fail) return Verdict::fail;
    if (c.verdict == Verdict::inconclusive) any_inconclusive = true;
    if (c.verdict == Verdict::pass) any_pass = true;
  }
  if (any_inconclusive) return Verdict::inconclusive;
  return any_pass ? Verdict::pass : Verdict::not_applicable;
}

CheckReport parent(std::string condition, std::vector<CheckReport> children) {
  CheckReport r;
  r.condition = std::move(condition);
  r.children = std::move(children);
  r.verdict = combine(r.children);
  return r;
}

CheckReport vacuous(std::string condition, const std::string& why) {
  CheckReport r;
  r.condition = std::move(condition);
  r.verdict = Verdict::not_applicable;
  r.notes.push_back(why);
  return r;
}

void put_window(CheckReport& r, const AsymptoticWindow& w) {
  r.parameters["y0"] = w.y0;
  r.parameters["y_max"] = w.y_max;
  r.parameters["probes"] = w.probes;
}

/// log of the normalizer max(rho_-, rho_+) at x = e^t.
double log_normalizer_at_log(const CostSpec& cost, double t) {
  return std::max(log_cost_at_log(cost, Side::minus, t), log_cost_at_log(cost, Side::plus, t));
}

/// The integrated tail inequality l o psi^{-1}(y) <= rhs(y) for one (l, psi) combination.
/// With b = 1 the right-hand side is y/2 - 2 log psi^{-1}(y) - theta2 log y;
/// otherwise (1 - b/2) y + log L(e^{-y/2}) - 2 log psi^{-1}(y) - theta2 log y.
CheckReport integrated_tail(const DistSpec& dist, const CostSpec& cost, Side side, bool upper, double b,
                            const CfgParams& p, const std::string& label) {
  const std::string cond = label + " (" + side_name(side) + ", psi_" + tail_name(upper) + ")";
  if (!dist.tail_unbounded(upper)) return vacuous(cond, std::string("bounded ") + tail_name(upper) + " tail");
  CheckReport r;
  r.condition = cond;
  r.parameters["theta2"] = p.theta2;
  r.parameters["b"] = b;
  put_window(r, p.window);
  for (const double y : log_space(p.window.y0, p.window.y_max, p.window.probes)) {
    const double lp = dist.psi_inverse_log(upper, y);
    if (!std::isfinite(lp)) continue;
    const double lhs = log_cost_at_log(cost, side, lp);
    double rhs = -2.0 * lp - p.theta2 * std::log(y);
    if (b == 1.0) {
      rhs += 0.5 * y;
    } else {
      // L is slowly varying, so clamping the abscissa keeps log L finite without changing its limit.
      const double t = std::max(-0.5 * y, -300.0);
      rhs += (1.0 - 0.5 * b) * y + (log_normalizer_at_log(cost, t) - b * t);
    }
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) continue;
    r.margins.push_back({y, lhs, rhs, rhs - lhs});
  }
  r.verdict = asymptotic_verdict(r.margins);
  return r;
}

/// (psi o l^{-1})'(y) >= 2 + 2 theta / y for one (l, psi) combination.
CheckReport derivative_tail(const DistSpec& dist, const std::string& dist_label, const CostSpec& cost, Side side,
                            bool upper, const CfgParams& p) {
  const std::string cond =
      std::string("CFG_D(i) (") + side_name(side) + ", psi_" + dist_label + "_" + tail_name(upper) + ")";
  if (!dist.tail_unbounded(upper)) return vacuous(cond, std::string("bounded ") + tail_name(upper) + " tail");
  const double theta = side == Side::minus ? p.theta_minus : p.theta_plus;
  CheckReport r;
  r.condition = cond;
  r.parameters["theta"] = theta;
  r.parameters["fd_step"] = p.fd_step;
  put_window(r, p.derivative_window);
  const auto g = [&](double y) { return dist.psi_at_log(upper, log_cost_inverse(cost, side, y)); };
  std::size_t dropped = 0;
  for (const double y : log_space(p.derivative_window.y0, p.derivative_window.y_max, p.derivative_window.probes)) {
    const double h = p.fd_step * y;
    const double d = (g(y + h) - g(y - h)) / (2.0 * h);
    const double rhs = 2.0 + 2.0 * theta / y;
    if (!std::isfinite(d)) {
      ++dropped;
      continue;
    }
    r.margins.push_back({y, rhs, d, d - rhs});
  }
  if (dropped > 0) {
    r.notes.push_back(std::to_string(dropped) + " probes dropped: psi o l^{-1} overflows there");
  }
  r.verdict = asymptotic_verdict(r.margins);
  return r;
}

/// Whether liminf |F^{-1} - G^{-1}| = 0 at the tail, judged from tau on q = 10^-2 .. 10^-15.
bool tau_vanishes(const PairSpec& pair, bool upper, std::vector<double>& profile) {
  profile.clear();
  for (int k = 2; k <= 15; ++k) {
    const double q = std::pow(10.0, -k);
    profile.push_back(std::abs(upper ? quantile_difference_upper(pair, q) : quantile_difference(pair, q)));
  }
  const double last = profile.back();
  if (last < 1e-6) return true;
  const std::size_t n = profile.size();
  for (std::size_t i = n - 5; i + 1 < n; ++i) {
    if (!(profile[i + 1] < profile[i])) return false;
  }
  return last < 0.01 * profile.front();
}

CheckReport cfg_e_tail(const DistSpec& dist, const CostSpec& cost, bool upper, const CfgParams& p) {
  const double b = cost.b();
  std::vector<CheckReport> kids;
  for (const Side side : {Side::plus, Side::minus}) {
    kids.push_back(integrated_tail(dist, cost, side, upper, b, p, "CFG_E"));
  }
  CheckReport r = parent(std::string("CFG_E ") + tail_name(upper) + " tail", std::move(kids));
  r.parameters["theta2"] = p.theta2;
  return r;
}

double h_lower_or_upper(const DistSpec& d, bool upper, double q) {
  return upper ? d.density_quantile_upper(q) : d.density_quantile(q);
}

/// int_0^1 g(u) du split as an interior Gauss-Kronrod piece and two endpoint series.
struct EndpointIntegral {
  double value = 0.0;
  quad::TailSeries lower, upper;
  bool converges() const { return lower.converges && upper.converges; }
};

EndpointIntegral endpoint_integral(const std::function<double(bool, double)>& g, double q_split) {
  EndpointIntegral e;
  const auto interior = quad::integrate(
      [&](double u) { return u <= 0.5 ? g(false, u) : g(true, 1.0 - u); }, q_split, 1.0 - q_split, 1e-9);
  e.lower = quad::tail_series([&](double q) { return g(false, q); }, q_split);
  e.upper = quad::tail_series([&](double q) { return g(true, q); }, q_split);
  e.value = interior.value + e.lower.total() + e.upper.total();
  return e;
}

void describe_series(CheckReport& r, const char* which, const quad::TailSeries& ts) {
  std::ostringstream os;
  os << which << " endpoint: " << ts.mode;
  if (ts.mode == "power") os << " decay, exponent " << ts.decay_exponent;
  os << (ts.converges ? ", converges" : ", diverges");
  r.notes.push_back(os.str());
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
    case Verdict::not_applicable:
      return "not_applicable";
  }
  return "unknown";
}

std::string CheckReport::first_problem() const {
  for (const auto& c : children) {
    if (c.verdict == Verdict::fail || (verdict != Verdict::fail && c.verdict == Verdict::inconclusive)) {
      return c.first_problem();
    }
  }
  return condition;
}

Verdict asymptotic_verdict(const std::vector<MarginPoint>& margins) {
  if (margins.size() < 2) return Verdict::inconclusive;
  const MarginPoint& last = margins.back();
  // First probe of the last decade.
  auto first = std::find_if(margins.begin(), margins.end(),
                            [&](const MarginPoint& m) { return m.point >= last.point / 10.0; });
  if (first == margins.end() || first->point >= last.point) first = margins.end() - 2;
  const double decades = std::log10(last.point / first->point);
  const double extrapolated = last.margin + (last.margin - first->margin) / decades;
  const bool all_nonnegative =
      std::all_of(margins.begin(), margins.end(), [](const MarginPoint& m) { return m.margin >= 0.0; });
  if (all_nonnegative && extrapolated >= 0.0) return Verdict::pass;
  if (last.margin < 0.0 && extrapolated < 0.0) return Verdict::fail;
  return Verdict::inconclusive;
}

CheckReport check_fg(const DistSpec& dist, double fd_step) {
  constexpr int kPerSide = 1000;
  const std::vector<double> qs = log_space(1e-8, 0.5, kPerSide);
  CheckReport fg2, fg3;
  fg2.condition = "FG2";
  fg3.condition = "FG3";
  for (CheckReport* r : {&fg2, &fg3}) {
    r->parameters["grid_points"] = 2 * kPerSide;
    r->parameters["q_min"] = 1e-8;
  }
  fg2.parameters["fd_step"] = fd_step;

  // Walk from the centre outwards so that the running maximum is taken over
  // shrinking q; the last decade of probes then decides stabilization.
  double run2 = 0.0, run3 = 0.0, run2_decade = -1.0, run3_decade = -1.0;
  for (auto it = qs.rbegin(); it != qs.rend(); ++it) {
    const double q = *it;
    double v2 = 0.0, v3 = 0.0;
    for (const bool upper : {false, true}) {
      const double h = h_lower_or_upper(dist, upper, q);
      const double u = upper ? 1.0 - q : q;
      if (!(h > 0.0) || !std::isfinite(h)) {
        CheckReport r;
        r.condition = "FG";
        r.verdict = Verdict::fail;
        std::ostringstream os;
        os << "density quantile h vanishes or is not finite at u = " << u;
        r.notes.push_back(os.str());
        r.margins.push_back({u, h, 0.0, -1.0});
        return r;
      }
      const double step = fd_step * q;
      const double dlog =
          (std::log(h_lower_or_upper(dist, upper, q + step)) - std::log(h_lower_or_upper(dist, upper, q - step))) /
          (2.0 * step);
      const double x = upper ? dist.quantile_upper(q) : dist.quantile(q);
      v2 = std::max(v2, q * std::abs(dlog));
      v3 = std::max(v3, q / ((std::abs(x) + 1.0) * h));
    }
    if (q <= 1e-7 && run2_decade < 0.0) {
      run2_decade = run2;
      run3_decade = run3;
    }
    run2 = std::max(run2, v2);
    run3 = std::max(run3, v3);
    fg2.margins.push_back({q, v2, run2, run2 - v2});
    fg3.margins.push_back({q, v3, run3, run3 - v3});
  }
  const auto settle = [](CheckReport& r, double before, double after) {
    const double change = after > 0.0 ? (after - before) / after : 0.0;
    r.parameters["sup"] = after;
    r.parameters["last_decade_relative_change"] = change;
    if (!std::isfinite(after)) {
      r.verdict = Verdict::fail;
      r.notes.push_back("supremum is not finite");
    } else if (change < 0.01) {
      r.verdict = Verdict::pass;
    } else {
      r.verdict = Verdict::inconclusive;
      r.notes.push_back("running maximum still grows over the last decade of probes");
    }
  };
  settle(fg2, run2_decade, run2);
  settle(fg3, run3_decade, run3);
  CheckReport r = parent("FG", {fg2, fg3});
  if (!dist.smooth()) r.notes.push_back("C2 smoothness is declared, not verified, for this distribution");
  return r;
}

CheckReport check_cfg_e(const DistSpec& dist, const CostSpec& cost, const CfgParams& params) {
  if (!(cost.b_minus < 2.0 && cost.b_plus < 2.0)) {
    throw ValidationError("CFG_E requires b_minus, b_plus < 2; for b = 2 use the quadratic-cost hypotheses check");
  }
  CheckReport r = parent("CFG_E", {cfg_e_tail(dist, cost, false, params), cfg_e_tail(dist, cost, true, params)});
  r.parameters["theta2"] = params.theta2;
  r.parameters["b"] = cost.b();
  return r;
}

CheckReport check_cfg_d(const PairSpec& pair, const CostSpec& cost, const CfgParams& params) {
  std::vector<CheckReport> part_i;
  for (const auto& [dist, label] : {std::pair{pair.x, "X"}, std::pair{pair.y, "Y"}}) {
    if (label[0] == 'Y' && pair.x.family() == pair.y.family() && pair.x.params() == pair.y.params()) continue;
    for (const bool upper : {true, false}) {
      for (const Side side : {Side::plus, Side::minus}) {
        part_i.push_back(derivative_tail(dist, label, cost, side, upper, params));
      }
    }
  }
  CheckReport cond_i = parent("CFG_D(i)", std::move(part_i));
  cond_i.parameters["theta_minus"] = params.theta_minus;
  cond_i.parameters["theta_plus"] = params.theta_plus;

  std::vector<CheckReport> part_ii;
  for (const bool upper : {true, false}) {
    const std::string label = std::string("CFG_D(ii) ") + tail_name(upper) + " tail";
    const bool d_at_tail = (upper ? pair.partition.last() : pair.partition.first()) == Region::D;
    if (!d_at_tail) {
      part_ii.push_back(vacuous(label, "outer interval lies in E"));
      continue;
    }
    std::vector<double> profile;
    if (!tau_vanishes(pair, upper, profile)) {
      CheckReport r = vacuous(label, "|F^{-1} - G^{-1}| stays away from 0 at this tail");
      for (std::size_t k = 0; k < profile.size(); ++k) {
        r.margins.push_back({std::pow(10.0, -static_cast<double>(k + 2)), profile[k], 0.0, profile[k]});
      }
      part_ii.push_back(std::move(r));
      continue;
    }
    // Right tail: (l_+, psi_X^+) and (l_-, psi_Y^+). Left tail: (l_-, psi_X^-) and (l_+, psi_Y^-).
    std::vector<CheckReport> kids;
    const Side sx = upper ? Side::plus : Side::minus;
    const Side sy = upper ? Side::minus : Side::plus;
    kids.push_back(integrated_tail(pair.x, cost, sx, upper, 1.0, params, "CFG_D(ii) X"));
    kids.push_back(integrated_tail(pair.y, cost, sy, upper, 1.0, params, "CFG_D(ii) Y"));
    part_ii.push_back(parent(label, std::move(kids)));
  }
  CheckReport cond_ii = parent("CFG_D(ii)", std::move(part_ii));
  cond_ii.parameters["theta2"] = params.theta2;
  return parent("CFG_D", {cond_i, cond_ii});
}

CheckReport check_cfg_ed(const PairSpec& pair, const CostSpec& cost, const CfgParams& params) {
  if (pair.partition.all(Region::E)) {
    CheckReport r = check_cfg_e(pair.x, cost, params);
    r.notes.push_back("E = (0,1): only CFG_E applies");
    return r;
  }
  std::vector<CheckReport> kids;
  kids.push_back(check_cfg_d(pair, cost, params));
  if (pair.partition.first() == Region::E || pair.partition.last() == Region::E) {
    if (!(cost.b_minus < 2.0 && cost.b_plus < 2.0)) {
      throw ValidationError("an outer E interval requires b_minus, b_plus < 2");
    }
  }
  if (pair.partition.first() == Region::E) kids.push_back(cfg_e_tail(pair.x, cost, false, params));
  if (pair.partition.last() == Region::E) kids.push_back(cfg_e_tail(pair.x, cost, true, params));
  CheckReport r = parent("CFG_ED", std::move(kids));
  if (r.children.size() == 1) r.notes.push_back("E is compact in (0,1): only CFG_D applies");
  return r;
}

CheckReport check_w2_hypotheses(const DistSpec& dist) {
  std::vector<CheckReport> kids;
  for (const bool upper : {false, true}) {
    CheckReport r;
    r.condition = std::string("W2 limit ") + (upper ? "(1-u)/h at u -> 1" : "u/h at u -> 0");
    r.parameters["threshold"] = 1e-3;
    std::vector<double> v;
    for (int k = 2; k <= 15; ++k) {
      const double q = std::pow(10.0, -k);
      v.push_back(q / h_lower_or_upper(dist, upper, q));
      r.margins.push_back({q, v.back(), 1e-3, 1e-3 - v.back()});
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) decreasing = decreasing && v[i + 1] < v[i];
    if (v.back() <= 1e-3 || (decreasing && v.back() <= 0.5 * v.front())) {
      r.verdict = Verdict::pass;
      if (v.back() > 1e-3) r.notes.push_back("above 1e-3 at q = 1e-15 but steadily decreasing");
    } else {
      r.verdict = Verdict::fail;
      r.notes.push_back("ratio does not decrease towards 0");
    }
    kids.push_back(std::move(r));
  }
  CheckReport integral;
  integral.condition = "W2 integral of u(1-u)/h^2";
  const auto e = endpoint_integral(
      [&](bool upper, double q) {
        const double r = std::sqrt(q * (1.0 - q)) / h_lower_or_upper(dist, upper, q);
        return r * r;
      },
      1e-2);
  describe_series(integral, "lower", e.lower);
  describe_series(integral, "upper", e.upper);
  integral.parameters["integral"] = e.converges() ? e.value : INFINITY;
  integral.verdict = e.converges() ? Verdict::pass : Verdict::fail;
  kids.push_back(std::move(integral));
  return parent("W2", std::move(kids));
}

CheckReport check_compact(const DistSpec& dist, const CostSpec& cost, double b_prime) {
  if (!dist.support().bounded()) {
    throw ValidationError("compact-support check needs a bounded support; unbounded supports use CFG_E");
  }
  if (!(b_prime > cost.b_minus && b_prime > cost.b_plus)) {
    throw ValidationError("compact-support check needs b' > max(b_minus, b_plus)");
  }
  CheckReport r;
  r.condition = "COMPACT";
  r.parameters["b_prime"] = b_prime;
  const auto e = endpoint_integral(
      [&](bool upper, double q) {
        return std::pow(std::sqrt(q * (1.0 - q)) / h_lower_or_upper(dist, upper, q), b_prime);
      },
      1e-3);
  describe_series(r, "lower", e.lower);
  describe_series(r, "upper", e.upper);
  r.parameters["integral"] = e.converges() ? e.value : INFINITY;
  r.verdict = e.converges() ? Verdict::pass : Verdict::fail;
  return r;
}

CheckReport check_cost(const CostSpec& cost) {
  CheckReport r;
  r.condition = "C";
  r.parameters["b_minus"] = cost.b_minus;
  r.parameters["b_plus"] = cost.b_plus;
  r.parameters["pi_minus"] = cost.pi_minus;
  r.parameters["pi_plus"] = cost.pi_plus;
  try {
    validate_cost(cost);
    r.verdict = Verdict::pass;
  } catch (const ValidationError& e) {
    r.verdict = Verdict::fail;
    r.notes.push_back(e.what());
  }
  if (!cost.l_prime_verified) {
    r.notes.push_back("derivative restriction on the slowly varying part of l is declared, not verified");
  }
  return r;
}

CheckReport check_one_sample(const DistSpec& dist, double p, const CfgParams& params) {
  if (!(p >= 1.0 && p < 2.0)) throw ValidationError("one-sample check needs 1 <= p < 2");
  CheckReport r = check_cfg_e(dist, power_cost(p), params);
  r.condition = "ONE_SAMPLE_TAIL";
  r.parameters["pareto_threshold"] = 2.0 * (p + 2.0) / (2.0 - p);
  return r;
}

CheckReport check_for_regime(const PairSpec& pair, const CostSpec& cost, const CfgParams& params) {
  std::vector<CheckReport> kids;
  kids.push_back(check_cost(cost));
  kids.push_back(check_fg(pair.x));
  if (!pair.same_marginals()) kids.push_back(check_fg(pair.y));
  switch (select_regime(pair, cost)) {
    case Regime::compact:
      kids.push_back(check_compact(pair.x, cost, std::max(cost.b_minus, cost.b_plus) + 0.1));
      break;
    case Regime::quadratic:
      kids.push_back(check_w2_hypotheses(pair.x));
      break;
    case Regime::equal:
      kids.push_back(check_cfg_e(pair.x, cost, params));
      break;
    case Regime::distinct:
      kids.push_back(check_cfg_d(pair, cost, params));
      break;
    case Regime::mixed:
    case Regime::one_sample:
      kids.push_back(check_cfg_ed(pair, cost, params));
      break;
  }
  return parent("HYPOTHESES", std::move(kids));
}

namespace {

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j;
  j["condition"] = r.condition;
  j["verdict"] = verdict_name(r.verdict);
  j["parameters"] = r.parameters;
  j["notes"] = r.notes;
  auto& m = j["margins"] = nlohmann::json::array();
  for (const auto& p : r.margins) m.push_back({{"point", p.point}, {"lhs", p.lhs}, {"rhs", p.rhs}, {"margin", p.margin}});
  auto& c = j["children"] = nlohmann::json::array();
  for (const auto& k : r.children) c.push_back(to_json(k));
  return j;
}

void table_rows(std::ostringstream& os, const CheckReport& r, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  os << pad << r.condition << ": " << verdict_name(r.verdict) << '\n';
  for (const auto& n : r.notes) os << pad << "  note: " << n << '\n';
  if (!r.margins.empty()) {
    os << pad << "  " << std::setw(14) << "point" << std::setw(16) << "lhs" << std::setw(16) << "rhs"
       << std::setw(16) << "margin" << '\n';
    const std::size_t n = r.margins.size();
    const std::size_t rows = std::min<std::size_t>(n, 8);
    for (std::size_t k = 0; k < rows; ++k) {
      const auto& p = r.margins[rows == 1 ? 0 : k * (n - 1) / (rows - 1)];
      os << pad << "  " << std::setw(14) << std::setprecision(6) << p.point << std::setw(16) << p.lhs
         << std::setw(16) << p.rhs << std::setw(16) << p.margin << '\n';
    }
  }
  for (const auto& c : r.children) table_rows(os, c, depth + 1);
}

}  // namespace

std::string report_json(const CheckReport& report, int indent) { return to_json(report).dump(indent); }

std::string report_table(const CheckReport& report) {
  std::ostringstream os;
  table_rows(os, report, 0);
  return os.str();
}

}  // namespace wcost
