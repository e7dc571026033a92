#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "signglm/kernels.hpp"

using namespace signglm;

namespace {

std::vector<double> random_vec(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v)
    x = scale * (static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0);
  return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 64, 255, 1000, 1003};

}  // namespace

TEST_CASE("scalar kernels match long-double references") {
  std::mt19937_64 gen(7);
  const auto& ops = kernels::scalar();
  for (std::size_t n : kSizes) {
    const auto x = random_vec(gen, n, 3.0);
    const auto y = random_vec(gen, n, 2.0);
    const double ref = oracle::dot_reference(x, y);
    CHECK(ops.dot(x.data(), y.data(), n) ==
          doctest::Approx(ref).epsilon(1e-13).scale(1.0 + std::fabs(ref)));
    CHECK(ops.sum_sq(x.data(), n) == doctest::Approx(oracle::dot_reference(x, x)).epsilon(1e-13));
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const kernels::Ops* simd = kernels::avx2();
  if (simd == nullptr) return;  // non-x86 build: scalar-only is fine
  const auto& ref = kernels::scalar();
  std::mt19937_64 gen(11);

  for (std::size_t n : kSizes) {
    const auto x = random_vec(gen, n, 5.0);
    const auto y = random_vec(gen, n, 0.7);

    // reductions may differ by summation order only
    const double scale = 1.0 + std::fabs(ref.dot(x.data(), y.data(), n));
    CHECK(simd->dot(x.data(), y.data(), n) ==
          doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-12).scale(scale));
    CHECK(simd->sum_sq(x.data(), n) ==
          doctest::Approx(ref.sum_sq(x.data(), n)).epsilon(1e-12));
    CHECK(simd->asum(x.data(), n) == doctest::Approx(ref.asum(x.data(), n)).epsilon(1e-12));
    CHECK(simd->amax(x.data(), n) == ref.amax(x.data(), n));  // max is exact

    // elementwise kernels must agree except for fma rounding in axpy
    std::vector<double> a = x, b = x;
    ref.scal(1.7, a.data(), n);
    simd->scal(1.7, b.data(), n);
    CHECK(a == b);

    std::vector<double> c(n), d(n);
    ref.clamp_min_zero(x.data(), c.data(), n);
    simd->clamp_min_zero(x.data(), d.data(), n);
    CHECK(c == d);

    ref.soft_threshold(x.data(), 0.3, c.data(), n);
    simd->soft_threshold(x.data(), 0.3, d.data(), n);
    CHECK(c == d);

    std::vector<double> ya = y, yb = y;
    ref.axpy(0.37, x.data(), ya.data(), n);
    simd->axpy(0.37, x.data(), yb.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-15).scale(1.0 + std::fabs(ya[i])));
  }
}

TEST_CASE("soft threshold definition") {
  const auto& ops = kernels::active();
  const double x[] = {2.0, -2.0, 0.5, -0.5, 0.0};
  double out[5];
  ops.soft_threshold(x, 1.0, out, 5);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == -1.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 0.0);
  CHECK(out[4] == 0.0);
  CHECK(!std::signbit(out[4]));
}

TEST_CASE("amax of empty and zero vectors") {
  const auto& ops = kernels::active();
  CHECK(ops.amax(nullptr, 0) == 0.0);
  const double z[3] = {0.0, -0.0, 0.0};
  CHECK(ops.amax(z, 3) == 0.0);
}

TEST_CASE("active table is one of the known tables") {
  const auto& t = kernels::active();
  const bool is_scalar = &t == &kernels::scalar();
  const bool is_avx2 = kernels::avx2() != nullptr && &t == kernels::avx2();
  CHECK((is_scalar || is_avx2));
}
