#include "signglm/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace signglm::linalg {

std::optional<Matrix> cholesky_lower(const Matrix& a) {
  const std::size_t p = a.n_rows;
  if (a.n_cols != p) throw std::invalid_argument("cholesky: matrix not square");
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vec solve_spd(const Matrix& a, const Vec& b) {
  auto lopt = cholesky_lower(a);
  if (!lopt) throw std::runtime_error("solve_spd: matrix not positive definite");
  const Matrix& l = *lopt;
  const std::size_t p = l.n_rows;
  Vec y(p), x(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t ii = p; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < p; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

std::optional<Vec> solve_general(Matrix a, Vec b) {
  const std::size_t p = a.n_rows;
  if (a.n_cols != p || b.size() != p) throw std::invalid_argument("solve_general: shape mismatch");
  std::vector<std::size_t> perm(p);
  for (std::size_t i = 0; i < p; ++i) perm[i] = i;
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(k, k));
    for (std::size_t i = k + 1; i < p; ++i) {
      const double v = std::fabs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-14) return std::nullopt;
    if (piv != k) {
      for (std::size_t j = 0; j < p; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < p; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      a(i, k) = 0.0;
      for (std::size_t j = k + 1; j < p; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(p);
  for (std::size_t ii = p; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < p; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

double spectral_norm_bound(const Matrix& a, int iters) {
  const std::size_t p = a.n_rows;
  if (p == 0) return 0.0;
  Vec v(p, 1.0 / static_cast<double>(p)), av;
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    matvec(a, v, av);
    const double nrm = std::sqrt(kernels::sum_sq(av.data(), p));
    if (nrm == 0.0) break;
    est = nrm;
    kernels::scal(1.0 / nrm, av.data(), p);
    v.swap(av);
  }
  // Rayleigh quotient converges from below; pad for a usable upper bound.
  return est * 1.05 + 1e-12;
}

double smallest_eigenvalue(const Matrix& a, double tol) {
  const std::size_t p = a.n_rows;
  if (p == 0) return 0.0;
  double hi = a(0, 0);
  for (std::size_t j = 1; j < p; ++j) hi = std::min(hi, a(j, j));  // lambda_min <= min diag
  double lo = -spectral_norm_bound(a) - 1.0;
  Matrix shifted = a;
  const double scale = std::max(1.0, std::fabs(hi));
  while (hi - lo > tol * scale) {
    const double mid = 0.5 * (lo + hi);
    for (std::size_t j = 0; j < p; ++j) shifted(j, j) = a(j, j) - mid;
    if (cholesky_lower(shifted))
      lo = mid;  // A - mid*I is PD, so lambda_min > mid
    else
      hi = mid;
  }
  return lo;
}

}  // namespace signglm::linalg
