#pragma once

#include <functional>
#include <string>

#include "signglm/matrix.hpp"

namespace signglm {

struct SolveOptions {
  double tol = 1e-8;        // optimality-certificate target
  int max_iter = 50000;
  double backtrack = 0.5;   // step shrink factor in (0,1)
  bool restart = true;      // adaptive (function-value) restart
  double init_curvature = 0.0;  // initial Lipschitz estimate; 0 = probe from 1

  void validate() const;
};

struct StageTrace {
  double mu;
  int iterations;
  double kkt;
};

struct SolveDiagnostics {
  int iterations = 0;
  double final_objective = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
  std::string note;                 // set on aborts (non-finite values etc.)
  std::vector<StageTrace> stages;   // smoothing continuation trace, when used
};

// ---- projections ----------------------------------------------------------

// componentwise max(v, 0)
Vec project_nonneg(Vec v);
// Euclidean projection onto {beta >= 0, sum beta = 1}
Vec project_simplex(Vec v);
// Euclidean projection onto {||u||_1 <= r}, r > 0
Vec project_l1_ball(Vec v, double r);

void project_nonneg_inplace(Vec& v);
void project_simplex_inplace(Vec& v);
void project_l1_ball_inplace(Vec& v, double r);

// ---- first-order engine ----------------------------------------------------

// Smooth part: returns f(x); fills *grad with its gradient when non-null.
using SmoothFn = std::function<double(const Vec& x, Vec* grad)>;
// In-place prox of the nonsmooth part with parameter `step` (projections
// ignore step; the l1 prox soft-thresholds by step*lambda).
using ProxFn = std::function<void(Vec& x, double step)>;
// Nonsmooth part's value at x (0 for indicator functions of feasible sets).
using NonsmoothValueFn = std::function<double(const Vec& x)>;
// Optimality certificate from the point and the smooth gradient there.
using ResidualFn = std::function<double(const Vec& x, const Vec& grad)>;

// FISTA with backtracking line search and adaptive restart. Stops at the
// first iterate whose certificate is <= tol and whose composite objective
// does not exceed the initial one; otherwise returns the best iterate seen.
std::pair<Vec, SolveDiagnostics> accelerated_proximal_gradient(
    const SmoothFn& smooth, const ProxFn& prox, const ResidualFn& residual, Vec init,
    const SolveOptions& opts, const NonsmoothValueFn& nonsmooth_value = nullptr);

// ---- optimality certificates ----------------------------------------------

// min over beta >= 0: grad_j = 0 where beta_j > 0, grad_j >= 0 where beta_j = 0.
// Throws when beta has negative entries.
double kkt_residual_nonneg(const Vec& grad, const Vec& beta);

// Same certificate with a coordinate-wise subgradient interval [glo, ghi];
// the residual is the distance to the nearest admissible selection.
double kkt_residual_nonneg_interval(const Vec& glo, const Vec& ghi, const Vec& beta);

// min over the standard simplex: grad_j = nu on the support, grad_j >= nu off
// it; the multiplier nu is optimized out in closed form.
double kkt_residual_simplex(const Vec& grad, const Vec& beta);

// min of smooth + lambda*||.||_1.
double kkt_residual_lasso(const Vec& grad, const Vec& beta, double lambda);
double kkt_residual_lasso_interval(const Vec& glo, const Vec& ghi, const Vec& beta,
                                   double lambda);

// Generic composite certificate ||x - P(x - grad)||_inf for projection-type
// prox operators (used where no structured certificate exists).
ResidualFn projection_fixed_point_residual(ProxFn project);

}  // namespace signglm
