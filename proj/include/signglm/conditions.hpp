#pragma once

#include <cstdint>
#include <optional>

#include "signglm/dataset.hpp"
#include "signglm/solve.hpp"

// Design-matrix constants of the oracle theory: the positive-eigenvalue
// constant tau^2 (min of beta' Sigma beta over the simplex), the (L,S)
// compatibility constant phi^2, a certified bracket for the restricted
// eigenvalue, and C = max_j ||psi_j||^2.

namespace signglm {

struct TauSqResult {
  double tau_sq = 0.0;
  Vec certificate;       // simplex vector achieving tau_sq
  double kkt_residual = 0.0;
};

// Convex QP over the standard simplex, multi-started from the vertices, the
// uniform point and seeded random points, with an active-face refinement.
// Throws std::domain_error when negative curvature shows the matrix is not
// PSD, naming the offending direction.
TauSqResult positive_eigenvalue_constant(const GramMatrix& gram, const SolveOptions& opts = {},
                                         std::uint64_t seed = 0x5EEDULL);

struct CompatibilityResult {
  double phi_sq = 0.0;
  Vec argmin;
  bool certified = true;  // false when the sign-pattern guard forced estimate mode
  double l_used = 0.0;
};

inline constexpr int kCompatibilityExactGuard = 14;  // 2^|S| subproblems

// phi(L,S)^2 = |S| * min of beta' Sigma beta over {||beta_S||_1 = 1,
// ||beta_{S^c}||_1 <= L}. Exact mode splits ||beta_S||_1 = 1 into 2^|S| sign
// patterns (halved by symmetry), each a convex QP under a product projection.
// Above the guard a random-multistart upper estimate is returned, flagged
// non-certified.
CompatibilityResult compatibility_constant(const GramMatrix& gram, const SupportSet& s, double l,
                                           const SolveOptions& opts = {},
                                           int exact_guard = kCompatibilityExactGuard,
                                           std::uint64_t seed = 0x5EEDULL);

struct ReBracket {
  double lower = 0.0;  // certified: smallest eigenvalue of Sigma
  double upper = 0.0;  // best cone-restricted Rayleigh ratio found by search
};

// Bracket for the (L,S,N)-restricted eigenvalue constant. The lower bound is
// certified (lambda_min <= the cone infimum); the upper bound comes from
// random cone sampling with the top-|N\S| selection rule plus local descent,
// and is an estimate only.
ReBracket restricted_eigenvalue_bracket(const GramMatrix& gram, const SupportSet& s, double l,
                                        std::size_t n_cap, std::size_t samples = 20000,
                                        std::uint64_t seed = 0x5EEDULL);

// C = max_j (1/n) sum_i x_ij^2.
double column_norm_constant(const Dataset& ds);

struct ConditionReport {
  double tau_sq = 0.0;
  Vec tau_certificate;
  std::optional<double> phi_sq_compat;
  std::optional<std::vector<std::size_t>> support;
  double l_used = 0.0;
  bool phi_certified = true;
  std::optional<double> re_lower, re_upper;
  double c_column = 0.0;  // C
  std::optional<double> k_x, k_0, margin_c;

  // tau^2 <= C and phi^2 <= |S| C, as in the theory; throws on violation.
  void check_invariants() const;
};

}  // namespace signglm
