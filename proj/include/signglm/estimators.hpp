#pragma once

#include <optional>

#include "signglm/loss.hpp"
#include "signglm/solve.hpp"

namespace signglm {

struct CvPoint {
  double lambda;
  double mean_loss;  // mean over folds of the fold-mean validation loss
  double se;         // sd over folds / sqrt(folds)
};

struct CvResult {
  double lambda_star = 0.0;
  std::vector<CvPoint> trace;  // descending lambda (path order)
  int reshuffles = 0;          // re-draws forced by single-class training folds
  bool stratified = false;     // fell back to class-stratified folds
};

struct FitResult {
  Vec beta;
  double objective = 0.0;  // empirical loss at beta (exact loss, no penalty)
  SolveDiagnostics diagnostics;
  std::optional<double> lambda_used;  // Lasso only
  std::vector<CvPoint> cv_trace;      // filled by the CV driver
  CvResult cv;                        // reshuffle/stratification details
};

// beta_hat = argmin over beta >= 0 of the empirical loss. The check loss is
// smoothed with a halving Moreau continuation and certified at the end
// against the exact subdifferential.
FitResult fit_sign_constrained(const Dataset& ds, const LossSpec& spec,
                               const SolveOptions& opts = {});

// beta_hat = argmin of empirical loss + lambda * ||beta||_1.
FitResult fit_lasso(const Dataset& ds, const LossSpec& spec, double lambda,
                    const SolveOptions& opts = {});

// Smallest lambda with an all-zero Lasso solution: max_j |grad_j L(0)|.
// For the check loss the kink rows (y_i = 0) use the midpoint subgradient.
double lambda_max(const Dataset& ds, const LossSpec& spec);

// K-fold CV over a log-spaced grid on [1e-3 * lambda_max, lambda_max].
// Selection is minimum mean validation loss (ties to the larger lambda);
// pass one_se = true for the 1-SE rule. Deterministic given the seed.
CvResult cross_validate_lambda(const Dataset& ds, const LossSpec& spec, int folds,
                               int grid_size, std::uint64_t seed,
                               const SolveOptions& opts = {}, bool one_se = false);

// CV, then a final full-data fit at the selected lambda.
FitResult fit_lasso_cv(const Dataset& ds, const LossSpec& spec, int folds, int grid_size,
                       std::uint64_t seed, const SolveOptions& opts = {},
                       bool one_se = false);

// Curvature bound (spectral norm of the loss Hessian at worst case) used to
// seed the engine's step size; power-method estimate on the implicit Gram.
double curvature_bound(const Dataset& ds, const LossSpec& spec, double mu = 0.0);

}  // namespace signglm
