#include "wcost/limitlaw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "kernels/common.hpp"
#include "wcost/error.hpp"
#include "wcost/kernels.hpp"
#include "wcost/quadrature.hpp"
#include "wcost/rng.hpp"
#include "wcost/special.hpp"

namespace wcost {
namespace {

constexpr std::size_t kBatch = 64;

using kernels::detail::Compensated;

double tail_distance(double u) { return u <= 0.5 ? u : 1.0 - u; }

double h_at(const DistSpec& d, double u) {
  return u <= 0.5 ? d.density_quantile(u) : d.density_quantile_upper(1.0 - u);
}

double tau_at(const PairSpec& pair, double u) {
  return u <= 0.5 ? quantile_difference(pair, u) : quantile_difference_upper(pair, 1.0 - u);
}

/// C(u,u) - u^2 expressed through the distance q to the nearest endpoint.
double cross_diagonal(const CouplingSpec& c, bool upper, double q) {
  switch (c.kind()) {
    case CouplingKind::independent:
      return 0.0;
    case CouplingKind::comonotone:
      return q * (1.0 - q);
    case CouplingKind::gaussian: {
      // Radial symmetry: the survival copula equals the copula.
      const double z = special::normal_quantile(q);
      return special::bivariate_normal_cdf(z, z, c.rho()) - q * q;
    }
    case CouplingKind::custom: {
      const double u = upper ? 1.0 - q : q;
      return c.copula(u, u) - u * u;
    }
  }
  return 0.0;
}

std::vector<double> make_grid(const GridSpec& s) {
  if (s.m < 1) throw ValidationError("bridge grid requires m >= 1");
  if (!(s.delta > 0.0 && s.delta < 0.5)) throw ValidationError("bridge grid requires 0 < delta < 1/2");
  if (s.m == 1) return {0.5};
  std::vector<double> u(s.m);
  if (s.spacing == GridSpacing::equispaced) {
    for (std::size_t i = 0; i < s.m; ++i) {
      u[i] = s.delta + (1.0 - 2.0 * s.delta) * static_cast<double>(i) / static_cast<double>(s.m - 1);
    }
  } else {
    const double lo = std::log(s.delta / (1.0 - s.delta));
    for (std::size_t i = 0; i < s.m; ++i) {
      const double t = lo - 2.0 * lo * static_cast<double>(i) / static_cast<double>(s.m - 1);
      u[i] = 1.0 / (1.0 + std::exp(-t));
    }
  }
  u.front() = s.delta;
  u.back() = 1.0 - s.delta;
  return u;
}

Eigen::MatrixXd bridge_kernel(const std::vector<double>& u) {
  const auto m = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j; i < m; ++i) {
      const double v = std::min(u[i], u[j]) - u[i] * u[j];
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

/// In-place lower Cholesky with the jitter ladder; returns the jitter used.
double factor_with_jitter(Eigen::MatrixXd& a, double& residual) {
  static constexpr double kLadder[] = {0.0, 1e-12, 1e-10, 1e-8};
  const Eigen::MatrixXd original = a;
  for (const double jitter : kLadder) {
    a = original;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(a);
    if (llt.info() != Eigen::Success) continue;
    a.triangularView<Eigen::StrictlyUpper>().setZero();
    // Residual on a fixed subset of rows keeps the check O(dim^2 * rows).
    const Eigen::Index dim = a.rows();
    const Eigen::Index stride = std::max<Eigen::Index>(1, dim / 64);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < dim; i += stride) {
      Eigen::VectorXd row = a * a.row(i).transpose();
      row(i) -= jitter;
      num += (row - original.col(i)).squaredNorm();
      den += original.col(i).squaredNorm();
    }
    residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
    if (residual <= 1e-6) return jitter;
  }
  std::ostringstream os;
  os << "bridge covariance factorization failed at jitter 1e-8 (dimension " << original.rows()
     << ", min diagonal " << original.diagonal().minCoeff() << ")";
  throw NumericalError(os.str());
}

/// Draw n_sim joint bridge paths in fixed batches and reduce each to a scalar.
/// Draw i always uses the stream derive_seed(seed, i), so results do not
/// depend on the thread count.
template <class Fn>
std::vector<double> simulate(const BridgeGrid& g, std::size_t n_sim, std::uint64_t seed, unsigned threads,
                             bool need_y, Fn fn) {
  const std::size_t m = g.m();
  const auto em = static_cast<Eigen::Index>(m);
  const std::size_t dim = g.layout == FactorLayout::shared ? m : (need_y ? 2 * m : m);
  std::vector<double> out(n_sim, 0.0);
  const std::size_t n_batches = (n_sim + kBatch - 1) / kBatch;
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    Eigen::MatrixXd z(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(kBatch));
    Eigen::MatrixXd bx, by;
    std::vector<double> scratch(m);
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) break;
      z.setZero();
      for (std::size_t c = 0; c < kBatch; ++c) {
        const std::size_t i = b * kBatch + c;
        if (i >= n_sim) break;
        Rng rng(derive_seed(seed, i));
        double* col = z.col(static_cast<Eigen::Index>(c)).data();
        for (std::size_t k = 0; k < dim; ++k) col[k] = rng.normal();
      }
      const auto lower = g.factor.triangularView<Eigen::Lower>();
      switch (g.layout) {
        case FactorLayout::shared:
          bx.noalias() = lower * z;
          break;
        case FactorLayout::block:
          bx.noalias() = lower * z.topRows(em);
          if (need_y) by.noalias() = lower * z.bottomRows(em);
          break;
        case FactorLayout::dense:
          if (need_y) {
            Eigen::MatrixXd joint = lower * z;
            bx = joint.topRows(em);
            by = joint.bottomRows(em);
          } else {
            // Marginal of X only: the leading block of a lower factor is the factor of the X block.
            bx.noalias() = g.factor.topLeftCorner(em, em).triangularView<Eigen::Lower>() * z.topRows(em);
          }
          break;
      }
      for (std::size_t c = 0; c < kBatch; ++c) {
        const std::size_t i = b * kBatch + c;
        if (i >= n_sim) break;
        const auto ec = static_cast<Eigen::Index>(c);
        const double* px = bx.col(ec).data();
        const double* py = (g.layout == FactorLayout::shared || !need_y) ? px : by.col(ec).data();
        out[i] = fn(i, px, py, scratch);
      }
    }
  };

  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_batches)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

double median_abs(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  return *mid;
}

/// Sum of the expected functional density over (0, delta) and (1 - delta, 1).
double tail_mass(const std::function<double(bool, double)>& density, double delta) {
  double total = 0.0;
  for (const bool upper : {false, true}) {
    const quad::TailSeries ts = quad::tail_series([&](double q) { return density(upper, q); }, delta);
    if (!ts.converges) return INFINITY;
    total += ts.total();
  }
  return total;
}

void finish(LimitDraws& d, const BridgeGrid& g, const DrawOptions& opt, Regime regime, double tail_bound) {
  d.regime = regime;
  d.grid = g.spec;
  d.jitter = g.jitter;
  d.factor_residual = g.factor_residual;
  d.seed = opt.seed;
  d.tail_bound = tail_bound;
  d.median_abs = median_abs(d.values);
  for (const double v : d.values) {
    if (!std::isfinite(v)) throw NumericalError("limit draw produced a non-finite value");
  }
  if (d.tail_bound > 0.05 * d.median_abs) {
    std::ostringstream os;
    os << "truncated tail bound " << d.tail_bound << " exceeds 5% of the median draw magnitude " << d.median_abs
       << " for the " << regime_name(regime) << " limit; shrink delta (now " << g.spec.delta << ")";
    if (opt.truncation == TruncationPolicy::error) throw TruncationError(os.str());
    warn(os.str());
  }
}

void check_grid_matches(const PairSpec& pair, const BridgeGrid& g) {
  if (g.m() == 0 || g.inv_hx.size() != g.m()) throw ValidationError("bridge grid is empty or inconsistent");
  (void)pair;
}

/// Weights w_i * rho_c'(tau(u_i)) on D points, zero elsewhere.
std::vector<double> d_weights(const PairSpec& pair, const CostSpec& cost, const std::vector<double>& u,
                              const std::vector<double>& w) {
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (pair.partition.at(u[i]) != Region::D) continue;
    const double tau = tau_at(pair, u[i]);
    if (tau != 0.0) out[i] = w[i] * derivative(cost, tau);
  }
  return out;
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::equal:
      return "equal";
    case Regime::quadratic:
      return "quadratic";
    case Regime::compact:
      return "compact";
    case Regime::distinct:
      return "distinct";
    case Regime::mixed:
      return "mixed";
    case Regime::one_sample:
      return "one_sample";
  }
  return "unknown";
}

Regime parse_regime(const std::string& name) {
  for (const Regime r : {Regime::equal, Regime::quadratic, Regime::compact, Regime::distinct, Regime::mixed,
                         Regime::one_sample}) {
    if (regime_name(r) == name) return r;
  }
  throw ValidationError("unknown regime '" + name + "'");
}

Regime select_regime(const PairSpec& pair, const CostSpec& cost) {
  const double b = cost.b();
  if (pair.partition.all(Region::E)) {
    if (pair.x.support().bounded() && pair.y.support().bounded()) return Regime::compact;
    if (b < 2.0) return Regime::equal;
    if (cost.b_minus == 2.0 && cost.b_plus == 2.0) return Regime::quadratic;
    throw ValidationError("F = G on an unbounded support needs 1 <= b < 2, or b_minus = b_plus = 2");
  }
  if (pair.partition.all(Region::D)) {
    if (b > 2.0) throw ValidationError("distinct marginals need 1 <= b <= 2");
    return Regime::distinct;
  }
  if (b >= 2.0) throw ValidationError("a mixed E/D partition needs 1 <= b < 2");
  if (b == 1.0) {
    if ((cost.b_minus == 1.0 && !std::isfinite(cost.L0_minus)) || (cost.b_plus == 1.0 && !std::isfinite(cost.L0_plus))) {
      throw ValidationError("cost violates (Lpi): b = 1 with E non-empty needs finite L_minus(0) and L_plus(0)");
    }
  }
  return Regime::mixed;
}

Eigen::MatrixXd bridge_covariance(const PairSpec& pair, const std::vector<double>& u) {
  const auto m = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd cov(2 * m, 2 * m);
  const Eigen::MatrixXd k = bridge_kernel(u);
  cov.topLeftCorner(m, m) = k;
  cov.bottomRightCorner(m, m) = k;
  Eigen::MatrixXd x(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) x(i, j) = pair.coupling.copula(u[i], u[j]) - u[i] * u[j];
  }
  cov.topRightCorner(m, m) = x;
  cov.bottomLeftCorner(m, m) = x.transpose();
  return cov;
}

BridgeGrid build_bridge_grid(const PairSpec& pair, const GridSpec& spec) {
  BridgeGrid g;
  g.spec = spec;
  g.u = make_grid(spec);
  const std::size_t m = g.u.size();
  g.weights = m == 1 ? std::vector<double>{1.0} : quad::trapezoid_weights(g.u);
  g.inv_hx.resize(m);
  g.inv_hy.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    g.inv_hx[i] = 1.0 / h_at(pair.x, g.u[i]);
    g.inv_hy[i] = 1.0 / h_at(pair.y, g.u[i]);
    if (!std::isfinite(g.inv_hx[i]) || !std::isfinite(g.inv_hy[i])) {
      std::ostringstream os;
      os << "density quantile vanishes at grid point u = " << g.u[i];
      throw NumericalError(os.str());
    }
  }
  switch (pair.coupling.kind()) {
    case CouplingKind::comonotone:
      g.layout = FactorLayout::shared;
      g.factor = bridge_kernel(g.u);
      break;
    case CouplingKind::independent:
      g.layout = FactorLayout::block;
      g.factor = bridge_kernel(g.u);
      break;
    default:
      g.layout = FactorLayout::dense;
      g.factor = bridge_covariance(pair, g.u);
      break;
  }
  g.jitter = factor_with_jitter(g.factor, g.factor_residual);
  return g;
}

Eigen::MatrixXd draw_bridges(const BridgeGrid& grid, std::size_t n_sim, std::uint64_t seed, unsigned threads) {
  const std::size_t m = grid.m();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(2 * m), static_cast<Eigen::Index>(n_sim));
  simulate(grid, n_sim, seed, threads, true,
           [&](std::size_t i, const double* bx, const double* by, std::vector<double>&) {
             const auto col = static_cast<Eigen::Index>(i);
             for (std::size_t k = 0; k < m; ++k) {
               out(static_cast<Eigen::Index>(k), col) = bx[k];
               out(static_cast<Eigen::Index>(m + k), col) = by[k];
             }
             return 0.0;
           });
  return out;
}

double limit_variance_at(const PairSpec& pair, bool upper, double q) {
  const double hx = upper ? pair.x.density_quantile_upper(q) : pair.x.density_quantile(q);
  const double hy = upper ? pair.y.density_quantile_upper(q) : pair.y.density_quantile(q);
  const double base = q * (1.0 - q);
  const double cross = cross_diagonal(pair.coupling, upper, q);
  // Scaled before squaring: h can be far below sqrt(DBL_MIN) deep in a light tail.
  const double ax = std::sqrt(base) / hx, ay = std::sqrt(base) / hy;
  const double s2 = ax * ax + ay * ay - 2.0 * (cross / base) * ax * ay;
  return std::max(0.0, s2);
}

LimitDraws draw_limit_E(const PairSpec& pair, const CostSpec& cost, const BridgeGrid& grid, const DrawOptions& opt) {
  check_grid_matches(pair, grid);
  const kernels::PowerCost lim{cost.pi_minus, cost.pi_plus, cost.b_minus, cost.b_plus};
  const auto& w = grid.weights;
  LimitDraws d;
  d.values = simulate(grid, opt.n_sim, opt.seed, opt.threads, true,
                      [&](std::size_t, const double* bx, const double* by, std::vector<double>& path) {
                        const std::size_t m = grid.m();
                        kernels::bridge_difference({bx, m}, {by, m}, grid.inv_hx, grid.inv_hy, path);
                        return kernels::weighted_cost_sum(path, w, lim);
                      });
  const double mm = special::abs_normal_moment(cost.b_minus), mp = special::abs_normal_moment(cost.b_plus);
  const double bound = tail_mass(
      [&](bool upper, double q) {
        const double s = std::sqrt(limit_variance_at(pair, upper, q));
        return 0.5 * (cost.pi_minus * mm * std::pow(s, cost.b_minus) + cost.pi_plus * mp * std::pow(s, cost.b_plus));
      },
      grid.spec.delta);
  const bool bounded = pair.x.support().bounded() && pair.y.support().bounded();
  finish(d, grid, opt, bounded ? Regime::compact : Regime::equal, bound);
  return d;
}

LimitDraws draw_limit_W2(const PairSpec& pair, const BridgeGrid& grid, const DrawOptions& opt) {
  check_grid_matches(pair, grid);
  const kernels::PowerCost sq{1.0, 1.0, 2.0, 2.0};
  LimitDraws d;
  d.values = simulate(grid, opt.n_sim, opt.seed, opt.threads, true,
                      [&](std::size_t, const double* bx, const double* by, std::vector<double>& path) {
                        const std::size_t m = grid.m();
                        kernels::bridge_difference({bx, m}, {by, m}, grid.inv_hx, grid.inv_hy, path);
                        return kernels::weighted_cost_sum(path, grid.weights, sq);
                      });
  const double bound =
      tail_mass([&](bool upper, double q) { return limit_variance_at(pair, upper, q); }, grid.spec.delta);
  finish(d, grid, opt, Regime::quadratic, bound);
  return d;
}

LimitDraws draw_limit_ED(const PairSpec& pair, const CostSpec& cost, const BridgeGrid& grid, const DrawOptions& opt) {
  check_grid_matches(pair, grid);
  if (!pair.partition.any(Region::D) && cost.b() > 1.0) {
    throw ValidationError("the E/D limit needs a D interval unless b = 1");
  }
  const std::vector<double> wd = d_weights(pair, cost, grid.u, grid.weights);
  std::vector<double> we(grid.m(), 0.0);
  for (std::size_t i = 0; i < grid.m(); ++i) {
    if (pair.partition.at(grid.u[i]) == Region::E) we[i] = grid.weights[i];
  }
  // The E terms survive only for branches with b = 1, weighted by L(0).
  const double cm = cost.b_minus == 1.0 ? cost.L0_minus : 0.0;
  const double cp = cost.b_plus == 1.0 ? cost.L0_plus : 0.0;
  const kernels::PowerCost eterm{cm, cp, 1.0, 1.0};
  const bool has_e = (cm != 0.0 || cp != 0.0) && pair.partition.any(Region::E);

  LimitDraws d;
  d.values = simulate(grid, opt.n_sim, opt.seed, opt.threads, true,
                      [&](std::size_t, const double* bx, const double* by, std::vector<double>& path) {
                        const std::size_t m = grid.m();
                        kernels::bridge_difference({bx, m}, {by, m}, grid.inv_hx, grid.inv_hy, path);
                        double v = kernels::dot(wd, path);
                        if (has_e) v += kernels::weighted_cost_sum(path, we, eterm);
                        return v;
                      });
  const double m1 = special::abs_normal_moment(1.0);
  const double bound = tail_mass(
      [&](bool upper, double q) {
        const double u = upper ? 1.0 - q : q;
        const double s = std::sqrt(limit_variance_at(pair, upper, q));
        if (pair.partition.at(u) == Region::D) {
          const double tau = upper ? quantile_difference_upper(pair, q) : quantile_difference(pair, q);
          return tau == 0.0 ? 0.0 : std::abs(derivative(cost, tau)) * m1 * s;
        }
        return 0.5 * (cm + cp) * m1 * s;
      },
      grid.spec.delta);
  finish(d, grid, opt, pair.partition.any(Region::E) ? Regime::mixed : Regime::distinct, bound);
  return d;
}

LimitDraws draw_limit_one_sample(const DistSpec& dist, double p, const BridgeGrid& grid, const DrawOptions& opt) {
  if (!(p >= 1.0)) throw ValidationError("one-sample limit requires p >= 1");
  if (grid.m() == 0) throw ValidationError("bridge grid is empty");
  const kernels::PowerCost lim{1.0, 1.0, p, p};
  LimitDraws d;
  d.values = simulate(grid, opt.n_sim, opt.seed, opt.threads, false,
                      [&](std::size_t, const double* bx, const double*, std::vector<double>& path) {
                        const std::size_t m = grid.m();
                        for (std::size_t k = 0; k < m; ++k) path[k] = bx[k] * grid.inv_hx[k];
                        return kernels::weighted_cost_sum(path, grid.weights, lim);
                      });
  const double mp = special::abs_normal_moment(p);
  const double bound = tail_mass(
      [&](bool upper, double q) {
        const double h = upper ? dist.density_quantile_upper(q) : dist.density_quantile(q);
        return mp * std::pow(std::sqrt(q * (1.0 - q)) / h, p);
      },
      grid.spec.delta);
  finish(d, grid, opt, Regime::one_sample, bound);
  return d;
}

LimitDraws draw_limit(const PairSpec& pair, const CostSpec& cost, const BridgeGrid& grid, const DrawOptions& opt) {
  switch (select_regime(pair, cost)) {
    case Regime::equal:
    case Regime::compact:
      return draw_limit_E(pair, cost, grid, opt);
    case Regime::quadratic: {
      LimitDraws d = draw_limit_E(pair, cost, grid, opt);
      d.regime = Regime::quadratic;
      return d;
    }
    case Regime::distinct:
    case Regime::mixed:
      return draw_limit_ED(pair, cost, grid, opt);
    case Regime::one_sample:
      break;
  }
  throw ValidationError("one-sample limits are drawn with draw_limit_one_sample");
}

Sigma2Result sigma2_D(const PairSpec& pair, const CostSpec& cost, const Sigma2Options& opt) {
  if (!pair.partition.any(Region::D)) throw ValidationError("sigma2_D needs a non-empty D set");
  Sigma2Result res;

  // Double quadrature on a logit grid: u = 1 / (1 + e^{-s}), du = u (1 - u) ds.
  {
    const std::size_t n = opt.quad_points;
    const double s0 = std::log(opt.quad_edge / (1.0 - opt.quad_edge));
    const double ds = -2.0 * s0 / static_cast<double>(n - 1);
    std::vector<double> u(n), ax(n), ay(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = s0 + ds * static_cast<double>(k);
      u[k] = 1.0 / (1.0 + std::exp(-s));
      const double q = tail_distance(u[k]);
      double w = ds * q * (1.0 - q);
      if (k == 0 || k + 1 == n) w *= 0.5;
      double g = 0.0;
      if (pair.partition.at(u[k]) == Region::D) {
        const double tau = tau_at(pair, u[k]);
        if (tau != 0.0) g = derivative(cost, tau);
      }
      ax[k] = g * w / h_at(pair.x, u[k]);
      ay[k] = g * w / h_at(pair.y, u[k]);
    }
    // sum_kl (min(u_k,u_l) - u_k u_l) c_k c_l via suffix sums on the sorted grid.
    const auto bridge_form = [&](const std::vector<double>& c1, const std::vector<double>& c2) {
      Compensated pair_sum, lin1, lin2;
      std::vector<double> suffix1(n + 1, 0.0), suffix2(n + 1, 0.0);
      for (std::size_t k = n; k-- > 0;) {
        suffix1[k] = suffix1[k + 1] + c1[k];
        suffix2[k] = suffix2[k + 1] + c2[k];
      }
      for (std::size_t k = 0; k < n; ++k) {
        pair_sum.add(u[k] * (c1[k] * c2[k] + c1[k] * suffix2[k + 1] + c2[k] * suffix1[k + 1]));
        lin1.add(u[k] * c1[k]);
        lin2.add(u[k] * c2[k]);
      }
      return pair_sum.value() - lin1.value() * lin2.value();
    };
    double sigma2 = bridge_form(ax, ax) + bridge_form(ay, ay);
    switch (pair.coupling.kind()) {
      case CouplingKind::independent:
        break;
      case CouplingKind::comonotone:
        sigma2 -= 2.0 * bridge_form(ax, ay);
        break;
      default: {
        Compensated cross;
        for (std::size_t k = 0; k < n; ++k) {
          if (ax[k] == 0.0) continue;
          for (std::size_t l = 0; l < n; ++l) {
            if (ay[l] == 0.0) continue;
            cross.add(ax[k] * ay[l] * (pair.coupling.copula(u[k], u[l]) - u[k] * u[l]));
          }
        }
        sigma2 -= 2.0 * cross.value();
        break;
      }
    }
    res.quadrature = std::max(0.0, sigma2);
  }

  // Monte Carlo: int w B = beta^T z with beta = L^T alpha on a logit bridge grid.
  {
    const BridgeGrid g = build_bridge_grid(pair, {opt.mc_m, opt.mc_delta, GridSpacing::logit});
    const std::size_t m = g.m();
    const auto em = static_cast<Eigen::Index>(m);
    const std::vector<double> wd = d_weights(pair, cost, g.u, g.weights);
    Eigen::VectorXd ax(em), ay(em);
    for (std::size_t i = 0; i < m; ++i) {
      ax(static_cast<Eigen::Index>(i)) = wd[i] * g.inv_hx[i];
      ay(static_cast<Eigen::Index>(i)) = wd[i] * g.inv_hy[i];
    }
    Eigen::VectorXd beta;
    const auto lt = g.factor.triangularView<Eigen::Lower>().transpose();
    switch (g.layout) {
      case FactorLayout::shared:
        beta = lt * (ax - ay);
        break;
      case FactorLayout::block:
        beta.resize(2 * em);
        beta.head(em) = lt * ax;
        beta.tail(em) = -(lt * ay);
        break;
      case FactorLayout::dense: {
        Eigen::VectorXd alpha(2 * em);
        alpha.head(em) = ax;
        alpha.tail(em) = -ay;
        beta = lt * alpha;
        break;
      }
    }
    const std::size_t dim = static_cast<std::size_t>(beta.size());
    std::vector<double> z(dim);
    Compensated sum, sum_sq;
    for (std::size_t i = 0; i < opt.mc_draws; ++i) {
      Rng rng(derive_seed(opt.seed, i));
      for (auto& v : z) v = rng.normal();
      const double val = kernels::dot({beta.data(), dim}, z);
      sum.add(val);
      sum_sq.add(val * val);
    }
    const double nd = static_cast<double>(opt.mc_draws);
    const double mean = sum.value() / nd;
    res.monte_carlo = std::max(0.0, (sum_sq.value() - nd * mean * mean) / (nd - 1.0));
    res.mc_draws = opt.mc_draws;
  }

  if (std::abs(res.quadrature - res.monte_carlo) > opt.tolerance * res.quadrature + 1e-12) {
    std::ostringstream os;
    os << "sigma2_D: quadrature " << res.quadrature << " and Monte Carlo " << res.monte_carlo
       << " disagree beyond " << 100.0 * opt.tolerance << "%";
    throw NumericalError(os.str());
  }
  return res;
}

}  // namespace wcost
