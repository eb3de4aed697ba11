#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wcost/kernels.hpp"
#include "wcost/rng.hpp"

using Catch::Matchers::WithinRel;
using namespace wcost;
using namespace wcost::kernels;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  Rng r(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = r.normal();
  return v;
}

struct IsaGuard {
  ~IsaGuard() { force_isa(std::nullopt); }
};

}  // namespace

TEST_CASE("scalar is always available and named", "[kernels]") {
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_available(active_isa()));
}

TEST_CASE("every available variant agrees with the scalar reference", "[kernels]") {
  IsaGuard guard;
  const std::vector<PowerCost> costs{{1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.5, 1.5}, {0.7, 0.3, 1.0, 1.0},
                                     {1.0, 2.0, 1.5, 1.0}, {1.0, 1.0, 2.0, 2.0}, {1.0, 1.0, 2.5, 2.5}};
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    const auto x = normals(n, 10 + n), y = normals(n, 20 + n), w = normals(n, 30 + n);
    std::vector<double> ref_out(n), out(n);
    scalar::bridge_difference(x, y, w, x, ref_out);
    const double ref_dot = scalar::dot(x, w);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (!isa_available(isa)) continue;
      force_isa(isa);
      INFO("isa " << isa_name(isa) << " n " << n);
      for (const auto& c : costs) {
        const double ref = scalar::cost_sum(x, y, c);
        const double got = cost_sum(x, y, c);
        if (n == 0) {
          CHECK(got == 0.0);
        } else {
          CHECK_THAT(got, WithinRel(ref, 1e-13));
        }
        const double wref = scalar::weighted_cost_sum(x, w, c);
        CHECK(std::abs(weighted_cost_sum(x, w, c) - wref) <= 1e-13 * (1.0 + std::abs(wref)) * (1.0 + n));
      }
      CHECK(std::abs(dot(x, w) - ref_dot) <= 1e-13 * (1.0 + n));
      bridge_difference(x, y, w, x, out);
      for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == ref_out[i]);
    }
  }
}

TEST_CASE("power kernel handles exact zeros and signs", "[kernels]") {
  const std::vector<double> x{1.0, -2.0, 0.0, 3.0, 0.5};
  const std::vector<double> y{1.0, 0.0, 0.0, 1.0, 1.5};
  const PowerCost c{2.0, 3.0, 2.0, 1.0};
  // differences 0, -2, 0, 2, -1 -> 0 + 2*4 + 0 + 3*2 + 2*1 = 16
  CHECK_THAT(scalar::cost_sum(x, y, c), WithinRel(16.0, 1e-15));
  CHECK_THAT(cost_sum(x, y, c), WithinRel(16.0, 1e-15));
  CHECK(cost_sum(x, x, PowerCost{1.0, 1.0, 1.5, 1.5}) == 0.0);
}
