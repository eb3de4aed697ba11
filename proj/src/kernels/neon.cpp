#include <arm_neon.h>

#include "common.hpp"
#include "wcost/error.hpp"

namespace wcost::kernels::neon {
namespace {

using detail::classify_exponent;
using detail::Compensated;
using detail::ExpClass;

struct LaneSum {
  float64x2_t sum = vdupq_n_f64(0.0);
  float64x2_t comp = vdupq_n_f64(0.0);

  void add(float64x2_t v) noexcept {
    const float64x2_t t = vaddq_f64(sum, v);
    const uint64x2_t big_sum = vcgeq_f64(vabsq_f64(sum), vabsq_f64(v));
    const float64x2_t c_sum = vaddq_f64(vsubq_f64(sum, t), v);
    const float64x2_t c_v = vaddq_f64(vsubq_f64(v, t), sum);
    comp = vaddq_f64(comp, vbslq_f64(big_sum, c_sum, c_v));
    sum = t;
  }

  Compensated fold() const noexcept {
    Compensated acc;
    acc.add(vgetq_lane_f64(sum, 0));
    acc.add(vgetq_lane_f64(sum, 1));
    acc.add(vgetq_lane_f64(comp, 0));
    acc.add(vgetq_lane_f64(comp, 1));
    return acc;
  }
};

struct VecPower {
  ExpClass cls;
  int k;

  explicit VecPower(double e) noexcept : cls(classify_exponent(e)), k(static_cast<int>(e)) {}

  float64x2_t operator()(float64x2_t a) const noexcept {
    switch (cls) {
      case ExpClass::one:
        return a;
      case ExpClass::two:
        return vmulq_f64(a, a);
      case ExpClass::small_integer: {
        float64x2_t r = a;
        for (int i = 1; i < k; ++i) r = vmulq_f64(r, a);
        return r;
      }
      case ExpClass::half_integer: {
        float64x2_t r = vsqrtq_f64(a);
        for (int i = 0; i < k; ++i) r = vmulq_f64(r, a);
        return r;
      }
      case ExpClass::general:
        break;
    }
    return a;
  }
};

bool vectorizable(const PowerCost& c) noexcept {
  return classify_exponent(c.exp_minus) != ExpClass::general && classify_exponent(c.exp_plus) != ExpClass::general;
}

inline float64x2_t cost_lanes(float64x2_t d, const VecPower& pm, const VecPower& pp, float64x2_t cm,
                              float64x2_t cp) noexcept {
  const float64x2_t ad = vabsq_f64(d);
  const uint64x2_t pos = vcgtq_f64(d, vdupq_n_f64(0.0));
  return vbslq_f64(pos, vmulq_f64(cp, pp(ad)), vmulq_f64(cm, pm(ad)));
}

}  // namespace

double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c) {
  if (x.size() != y.size()) throw ValidationError("cost_sum: length mismatch");
  if (!vectorizable(c)) return scalar::cost_sum(x, y, c);
  const VecPower pm(c.exp_minus), pp(c.exp_plus);
  const float64x2_t cm = vdupq_n_f64(c.coef_minus), cp = vdupq_n_f64(c.coef_plus);
  const std::size_t n = x.size();
  LaneSum lanes;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    lanes.add(cost_lanes(vsubq_f64(vld1q_f64(x.data() + i), vld1q_f64(y.data() + i)), pm, pp, cm, cp));
  }
  Compensated acc = lanes.fold();
  for (; i < n; ++i) acc.add(detail::power_cost(x[i] - y[i], c));
  return acc.value();
}

double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c) {
  if (v.size() != w.size()) throw ValidationError("weighted_cost_sum: length mismatch");
  if (!vectorizable(c)) return scalar::weighted_cost_sum(v, w, c);
  const VecPower pm(c.exp_minus), pp(c.exp_plus);
  const float64x2_t cm = vdupq_n_f64(c.coef_minus), cp = vdupq_n_f64(c.coef_plus);
  const std::size_t n = v.size();
  LaneSum lanes;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    lanes.add(vmulq_f64(vld1q_f64(w.data() + i), cost_lanes(vld1q_f64(v.data() + i), pm, pp, cm, cp)));
  }
  Compensated acc = lanes.fold();
  for (; i < n; ++i) acc.add(w[i] * detail::power_cost(v[i], c));
  return acc.value();
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("dot: length mismatch");
  const std::size_t n = a.size();
  LaneSum lanes;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) lanes.add(vmulq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
  Compensated acc = lanes.fold();
  for (; i < n; ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out) {
  const std::size_t m = out.size();
  if (bx.size() != m || by.size() != m || sx.size() != m || sy.size() != m) {
    throw ValidationError("bridge_difference: length mismatch");
  }
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const float64x2_t a = vmulq_f64(vld1q_f64(bx.data() + i), vld1q_f64(sx.data() + i));
    const float64x2_t b = vmulq_f64(vld1q_f64(by.data() + i), vld1q_f64(sy.data() + i));
    vst1q_f64(out.data() + i, vsubq_f64(a, b));
  }
  for (; i < m; ++i) out[i] = bx[i] * sx[i] - by[i] * sy[i];
}

}  // namespace wcost::kernels::neon
