#pragma once

#include <cstddef>

// Data-parallel arithmetic kernels used by every solver inner loop.
//
// Each kernel exists as a scalar reference implementation and, on x86-64
// hardware with AVX2+FMA, as a vectorized variant. The active table is
// selected once at startup; set SIGNGLM_KERNELS=scalar to force the
// reference path. Scalar and SIMD variants are equivalence-tested against
// each other (they may differ by summation order only).

namespace signglm::kernels {

struct Ops {
  const char* name;

  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]^2
  double (*sum_sq)(const double* x, std::size_t n);
  // sum_i |x[i]|
  double (*asum)(const double* x, std::size_t n);
  // max_i |x[i]|  (0 for n == 0)
  double (*amax)(const double* x, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // out[i] = max(x[i], 0)
  void (*clamp_min_zero)(const double* x, double* out, std::size_t n);
  // out[i] = sign(x[i]) * max(|x[i]| - t, 0)
  void (*soft_threshold)(const double* x, double t, double* out, std::size_t n);
};

// Reference kernels; always available.
const Ops& scalar();

// AVX2+FMA kernels, or nullptr when the binary/CPU cannot run them.
const Ops* avx2();

// Table selected at first use (CPU probe + SIGNGLM_KERNELS override).
const Ops& active();

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double sum_sq(const double* x, std::size_t n) { return active().sum_sq(x, n); }
inline double asum(const double* x, std::size_t n) { return active().asum(x, n); }
inline double amax(const double* x, std::size_t n) { return active().amax(x, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline void scal(double a, double* x, std::size_t n) { active().scal(a, x, n); }
inline void clamp_min_zero(const double* x, double* out, std::size_t n) { active().clamp_min_zero(x, out, n); }
inline void soft_threshold(const double* x, double t, double* out, std::size_t n) { active().soft_threshold(x, t, out, n); }

}  // namespace signglm::kernels
