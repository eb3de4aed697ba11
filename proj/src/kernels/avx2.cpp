#include <immintrin.h>

#include "common.hpp"
#include "wcost/error.hpp"

namespace wcost::kernels::avx2 {
namespace {

using detail::classify_exponent;
using detail::Compensated;
using detail::ExpClass;

struct LaneSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d v) noexcept {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d t = _mm256_add_pd(sum, v);
    const __m256d big_sum = _mm256_cmp_pd(_mm256_andnot_pd(sign, sum), _mm256_andnot_pd(sign, v), _CMP_GE_OQ);
    const __m256d c_sum = _mm256_add_pd(_mm256_sub_pd(sum, t), v);
    const __m256d c_v = _mm256_add_pd(_mm256_sub_pd(v, t), sum);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(c_v, c_sum, big_sum));
    sum = t;
  }

  // Lanes are folded in index order so the result does not depend on the caller.
  Compensated fold() const noexcept {
    alignas(32) double s[4];
    alignas(32) double c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    Compensated acc;
    for (int i = 0; i < 4; ++i) acc.add(s[i]);
    for (int i = 0; i < 4; ++i) acc.add(c[i]);
    return acc;
  }
};

struct VecPower {
  ExpClass cls;
  int k;  // integer part of the exponent

  explicit VecPower(double e) noexcept : cls(classify_exponent(e)), k(static_cast<int>(e)) {}

  __m256d operator()(__m256d a) const noexcept {
    switch (cls) {
      case ExpClass::one:
        return a;
      case ExpClass::two:
        return _mm256_mul_pd(a, a);
      case ExpClass::small_integer: {
        __m256d r = a;
        for (int i = 1; i < k; ++i) r = _mm256_mul_pd(r, a);
        return r;
      }
      case ExpClass::half_integer: {
        __m256d r = _mm256_sqrt_pd(a);
        for (int i = 0; i < k; ++i) r = _mm256_mul_pd(r, a);
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

inline __m256d cost_lanes(__m256d d, const VecPower& pm, const VecPower& pp, __m256d cm, __m256d cp) noexcept {
  const __m256d ad = _mm256_andnot_pd(_mm256_set1_pd(-0.0), d);
  const __m256d pos = _mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_GT_OQ);
  const __m256d vp = _mm256_mul_pd(cp, pp(ad));
  const __m256d vm = _mm256_mul_pd(cm, pm(ad));
  return _mm256_blendv_pd(vm, vp, pos);
}

}  // namespace

double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c) {
  if (x.size() != y.size()) throw ValidationError("cost_sum: length mismatch");
  if (!vectorizable(c)) return scalar::cost_sum(x, y, c);
  const VecPower pm(c.exp_minus), pp(c.exp_plus);
  const __m256d cm = _mm256_set1_pd(c.coef_minus), cp = _mm256_set1_pd(c.coef_plus);
  const std::size_t n = x.size();
  LaneSum lanes;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    lanes.add(cost_lanes(d, pm, pp, cm, cp));
  }
  Compensated acc = lanes.fold();
  for (; i < n; ++i) acc.add(detail::power_cost(x[i] - y[i], c));
  return acc.value();
}

double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c) {
  if (v.size() != w.size()) throw ValidationError("weighted_cost_sum: length mismatch");
  if (!vectorizable(c)) return scalar::weighted_cost_sum(v, w, c);
  const VecPower pm(c.exp_minus), pp(c.exp_plus);
  const __m256d cm = _mm256_set1_pd(c.coef_minus), cp = _mm256_set1_pd(c.coef_plus);
  const std::size_t n = v.size();
  LaneSum lanes;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = cost_lanes(_mm256_loadu_pd(v.data() + i), pm, pp, cm, cp);
    lanes.add(_mm256_mul_pd(_mm256_loadu_pd(w.data() + i), r));
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
  for (; i + 4 <= n; i += 4) {
    lanes.add(_mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  }
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
  for (; i + 4 <= m; i += 4) {
    const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(bx.data() + i), _mm256_loadu_pd(sx.data() + i));
    const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(by.data() + i), _mm256_loadu_pd(sy.data() + i));
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(a, b));
  }
  for (; i < m; ++i) out[i] = bx[i] * sx[i] - by[i] * sy[i];
}

}  // namespace wcost::kernels::avx2
