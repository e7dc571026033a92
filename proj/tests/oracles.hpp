#pragma once

// Test-only oracles. Everything here is deliberately brute force and shares
// no solver code with the library: enumeration over active sets / supports,
// plain Gaussian elimination, long-double reference sums.

#include <optional>
#include <vector>

#include "signglm/matrix.hpp"

namespace oracle {

using signglm::Matrix;
using signglm::Vec;

// Gaussian elimination with partial pivoting; test-local on purpose.
std::optional<Vec> solve_dense(std::vector<std::vector<double>> a, Vec b);

// argmin over beta >= 0 of beta' Q beta - 2 c' beta (Q PSD), by enumerating
// all 2^p candidate supports and keeping feasible KKT points. Covers NNLS
// with Q = X'X/n, c = X'y/n.
Vec nonneg_quadratic_enumeration(const Matrix& q, const Vec& c);

// min over the standard simplex of beta' Sigma beta, by solving the
// equality-constrained QP on every nonempty support subset and keeping the
// feasible stationary points (singular faces are covered by their subfaces).
double simplex_qp_enumeration(const Matrix& sigma);

// long-double Kahan reference for sum_i x_i * y_i
double dot_reference(const Vec& x, const Vec& y);

// central finite difference of a scalar function
template <class F>
double central_diff(F f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// dense beta' Sigma beta with a plain triple loop
double quad_form_reference(const Matrix& sigma, const Vec& beta);

}  // namespace oracle
