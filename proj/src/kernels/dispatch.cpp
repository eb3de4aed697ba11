#include <atomic>

#include "wcost/kernels.hpp"

namespace wcost::kernels {
namespace {

Isa detect() noexcept {
#if defined(WCOST_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
#if defined(WCOST_HAVE_NEON)
  return Isa::neon;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(WCOST_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(WCOST_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(std::optional<Isa> isa) {
  const Isa target = isa.value_or(detect());
  current().store(isa_available(target) ? target : Isa::scalar, std::memory_order_relaxed);
}

#if defined(WCOST_HAVE_AVX2)
#define WCOST_DISPATCH_AVX2(call) \
  case Isa::avx2:                 \
    return avx2::call;
#else
#define WCOST_DISPATCH_AVX2(call)
#endif

#if defined(WCOST_HAVE_NEON)
#define WCOST_DISPATCH_NEON(call) \
  case Isa::neon:                 \
    return neon::call;
#else
#define WCOST_DISPATCH_NEON(call)
#endif

#define WCOST_DISPATCH(call)    \
  switch (active_isa()) {       \
    WCOST_DISPATCH_AVX2(call)   \
    WCOST_DISPATCH_NEON(call)   \
    default:                    \
      return scalar::call;      \
  }

double cost_sum(std::span<const double> x, std::span<const double> y, const PowerCost& c) {
  WCOST_DISPATCH(cost_sum(x, y, c))
}

double weighted_cost_sum(std::span<const double> v, std::span<const double> w, const PowerCost& c) {
  WCOST_DISPATCH(weighted_cost_sum(v, w, c))
}

double dot(std::span<const double> a, std::span<const double> b) { WCOST_DISPATCH(dot(a, b)) }

void bridge_difference(std::span<const double> bx, std::span<const double> by, std::span<const double> sx,
                       std::span<const double> sy, std::span<double> out) {
  WCOST_DISPATCH(bridge_difference(bx, by, sx, sy, out))
}

}  // namespace wcost::kernels
