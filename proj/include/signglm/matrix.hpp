#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "signglm/kernels.hpp"

namespace signglm {

using Vec = std::vector<double>;

// Dense column-major matrix. All solvers stream over columns, so column
// access is the contiguous one.
struct Matrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> data;  // column-major, n_rows * n_cols

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : n_rows(r), n_cols(c), data(r * c, 0.0) {}

  double* col(std::size_t j) { return data.data() + j * n_rows; }
  const double* col(std::size_t j) const { return data.data() + j * n_rows; }

  double& operator()(std::size_t i, std::size_t j) { return data[j * n_rows + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[j * n_rows + i]; }
};

// out = A * x, accumulated column-wise (axpy per column).
inline void matvec(const Matrix& a, const Vec& x, Vec& out) {
  if (x.size() != a.n_cols) throw std::invalid_argument("matvec: dimension mismatch");
  out.assign(a.n_rows, 0.0);
  for (std::size_t j = 0; j < a.n_cols; ++j)
    if (x[j] != 0.0) kernels::axpy(x[j], a.col(j), out.data(), a.n_rows);
}

// out = A^T * r  (dot per column).
inline void matvec_t(const Matrix& a, const Vec& r, Vec& out) {
  if (r.size() != a.n_rows) throw std::invalid_argument("matvec_t: dimension mismatch");
  out.resize(a.n_cols);
  for (std::size_t j = 0; j < a.n_cols; ++j)
    out[j] = kernels::dot(a.col(j), r.data(), a.n_rows);
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace signglm
