#pragma once

#include <optional>

#include "signglm/matrix.hpp"

// Small dense decompositions for desk-scale symmetric problems: Cholesky,
// SPD solves, a power-method spectral bound, and a bisection-certified
// smallest eigenvalue. Everything is in-house; p stays modest here.

namespace signglm::linalg {

// Lower Cholesky factor of a symmetric positive definite matrix, or nullopt
// when a non-positive pivot is hit.
std::optional<Matrix> cholesky_lower(const Matrix& a);

// Solve A x = b with A symmetric positive definite (via Cholesky).
// Throws std::runtime_error when the factorization fails.
Vec solve_spd(const Matrix& a, const Vec& b);

// Solve A x = b by Gaussian elimination with partial pivoting.
// Returns nullopt when A is numerically singular.
std::optional<Vec> solve_general(Matrix a, Vec b);

// Upper bound (within ~5%) on the spectral norm of a symmetric PSD matrix,
// via power iteration. Used to seed step sizes.
double spectral_norm_bound(const Matrix& a, int iters = 60);

// Smallest eigenvalue of a symmetric matrix, certified by bisection on
// Cholesky feasibility of (A - s I): the returned value is a lower bound on
// lambda_min up to the bisection tolerance.
double smallest_eigenvalue(const Matrix& a, double tol = 1e-12);

}  // namespace signglm::linalg
