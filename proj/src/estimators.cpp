#include "signglm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "signglm/linalg.hpp"
#include "signglm/rng.hpp"

namespace signglm {

namespace {

constexpr double kGridRatio = 1e-3;  // lambda grid spans [ratio * lmax, lmax]

void validate_for_loss(const Dataset& ds, const LossSpec& spec) {
  ds.validate();
  spec.validate();
  if (spec.kind == LossKind::logistic && !ds.response_is_binary())
    throw std::invalid_argument("logistic loss: response must be exactly 0/1");
}

// Spectral-norm bound of the implicit Gram (1/n) X^T X by power iteration.
double gram_spectral_bound(const Dataset& ds) {
  const std::size_t n = ds.n(), p = ds.p();
  Vec v(p), xv, u;
  for (std::size_t j = 0; j < p; ++j) v[j] = 1.0 + 1e-3 * static_cast<double>(j % 7);
  double est = 0.0;
  for (int it = 0; it < 40; ++it) {
    matvec(ds.design, v, xv);
    matvec_t(ds.design, xv, u);
    kernels::scal(1.0 / static_cast<double>(n), u.data(), p);
    const double nrm = std::sqrt(kernels::sum_sq(u.data(), p));
    if (nrm == 0.0) return 0.0;
    est = nrm;
    kernels::scal(1.0 / nrm, u.data(), p);
    v.swap(u);
  }
  return est * 1.1 + 1e-12;
}

enum class Mode { nonneg, l1 };

SmoothFn make_smooth(const Dataset& ds, const LossSpec& spec, double mu) {
  return [&ds, spec, mu](const Vec& b, Vec* g) {
    if (g) return empirical_loss_value_grad(spec, ds, b, *g, mu);
    return empirical_loss_smoothed(spec, ds, b, mu);
  };
}

std::pair<Vec, SolveDiagnostics> solve_smoothed(const Dataset& ds, const LossSpec& spec,
                                                double mu, Mode mode, double lambda, Vec init,
                                                const SolveOptions& opts, double curvature) {
  SolveOptions local = opts;
  local.init_curvature = curvature;
  const SmoothFn smooth = make_smooth(ds, spec, mu);
  if (mode == Mode::nonneg) {
    const ProxFn prox = [](Vec& x, double) { project_nonneg_inplace(x); };
    const ResidualFn res = [](const Vec& x, const Vec& g) { return kkt_residual_nonneg(g, x); };
    return accelerated_proximal_gradient(smooth, prox, res, std::move(init), local);
  }
  const ProxFn prox = [lambda](Vec& x, double step) {
    kernels::soft_threshold(x.data(), step * lambda, x.data(), x.size());
  };
  const ResidualFn res = [lambda](const Vec& x, const Vec& g) {
    return kkt_residual_lasso(g, x, lambda);
  };
  const NonsmoothValueFn pen = [lambda](const Vec& x) {
    return lambda * kernels::asum(x.data(), x.size());
  };
  return accelerated_proximal_gradient(smooth, prox, res, std::move(init), local, pen);
}

// Exact-subdifferential certificate for the (nonsmooth) check loss.
double exact_check_residual(const Dataset& ds, const LossSpec& spec, Mode mode, double lambda,
                            const Vec& beta) {
  Vec glo, ghi;
  check_loss_grad_interval(spec.gamma, ds, beta, glo, ghi);
  return mode == Mode::nonneg ? kkt_residual_nonneg_interval(glo, ghi, beta)
                              : kkt_residual_lasso_interval(glo, ghi, beta, lambda);
}

// Moreau continuation mu_k = mu0 * 2^-k, warm-started; runs at least the
// configured stage count, then keeps halving until the exact-subdifferential
// residual meets tol (or mu underflows). Path mode is the cheap variant used
// inside CV: fixed short schedule, no exact certification.
std::pair<Vec, SolveDiagnostics> solve_check_continuation(const Dataset& ds,
                                                          const LossSpec& spec, Mode mode,
                                                          double lambda, Vec init,
                                                          const SolveOptions& opts,
                                                          double sigma_max, bool path_mode) {
  SolveDiagnostics total;
  Vec beta = std::move(init);

  std::vector<double> schedule;
  if (path_mode) {
    schedule = {1e-2, 1e-3, 1e-4};
  } else {
    const double mu0 = spec.smoothing_mu0 > 0.0 ? spec.smoothing_mu0 : 1.0;
    double mu = mu0;
    for (int k = 0; k < 64 && mu > 1e-10; ++k, mu *= 0.5) schedule.push_back(mu);
    if (schedule.empty()) schedule.push_back(mu0);
  }
  const int min_stages = std::min<int>(spec.smoothing_stages, static_cast<int>(schedule.size()));

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double mu = schedule[k];
    SolveOptions stage_opts = opts;
    stage_opts.tol = std::max(opts.tol, 1e-4 * mu);
    auto [b, d] = solve_smoothed(ds, spec, mu, mode, lambda, std::move(beta), stage_opts,
                                 sigma_max / mu);
    beta = std::move(b);
    total.iterations += d.iterations;
    total.stages.push_back({mu, d.iterations, d.kkt_residual});
    if (!d.note.empty()) total.note = d.note;
    if (!path_mode && static_cast<int>(k) + 1 >= min_stages) {
      const double exact = exact_check_residual(ds, spec, mode, lambda, beta);
      if (exact <= opts.tol) break;
    }
  }

  if (path_mode) {
    total.kkt_residual = total.stages.back().kkt;
    total.converged = true;  // CV only consumes the coefficients
  } else {
    total.kkt_residual = exact_check_residual(ds, spec, mode, lambda, beta);
    total.converged = total.kkt_residual <= opts.tol;
  }
  total.final_objective = empirical_loss(spec, ds, beta) +
                          (mode == Mode::l1
                               ? lambda * kernels::asum(beta.data(), beta.size())
                               : 0.0);
  return {std::move(beta), std::move(total)};
}

// Active-face refinement for sign-constrained least squares: solve the
// normal equations on the current support and keep the result when it is
// feasible and certifiably better.
void polish_nnls(const Dataset& ds, Vec& beta, SolveDiagnostics& diag, double tol) {
  const std::size_t n = ds.n(), p = ds.p();
  Vec c;
  matvec_t(ds.design, ds.response, c);
  kernels::scal(1.0 / static_cast<double>(n), c.data(), p);

  const auto gradient_at = [&](const Vec& b, Vec& g) {
    Vec fitted;
    matvec(ds.design, b, fitted);
    matvec_t(ds.design, fitted, g);
    for (std::size_t j = 0; j < p; ++j) g[j] = 2.0 * (g[j] / static_cast<double>(n) - c[j]);
  };

  Vec grad(p);
  gradient_at(beta, grad);
  double best_res = kkt_residual_nonneg(grad, beta);

  for (int round = 0; round < 8 && best_res > 0.0; ++round) {
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < p; ++j)
      if (beta[j] > 0.0) support.push_back(j);
    if (support.empty()) break;

    const std::size_t m = support.size();
    Matrix gram(m, m);
    Vec rhs(m);
    for (std::size_t a = 0; a < m; ++a) {
      rhs[a] = c[support[a]];
      for (std::size_t b = 0; b <= a; ++b) {
        const double v = kernels::dot(ds.design.col(support[a]), ds.design.col(support[b]), n) /
                         static_cast<double>(n);
        gram(a, b) = v;
        gram(b, a) = v;
      }
    }
    const auto sol = linalg::solve_general(gram, rhs);
    if (!sol) break;
    bool feasible = true;
    for (double v : *sol)
      if (v < -1e-10) feasible = false;
    if (!feasible) break;

    Vec candidate(p, 0.0);
    for (std::size_t a = 0; a < m; ++a) candidate[support[a]] = std::max((*sol)[a], 0.0);
    gradient_at(candidate, grad);
    const double res = kkt_residual_nonneg(grad, candidate);
    if (res < best_res) {
      beta = std::move(candidate);
      best_res = res;
      diag.kkt_residual = res;
      diag.converged = res <= tol;
    } else {
      break;
    }
    bool support_stable = true;
    for (std::size_t j = 0; j < p; ++j)
      if ((beta[j] > 0.0) != (std::find(support.begin(), support.end(), j) != support.end()))
        support_stable = false;
    if (support_stable) break;
  }
}

FitResult finish(const Dataset& ds, const LossSpec& spec, Mode mode, double lambda, Vec beta,
                 SolveDiagnostics diag) {
  FitResult out;
  out.objective = empirical_loss(spec, ds, beta);
  if (mode == Mode::l1) {
    out.objective += lambda * kernels::asum(beta.data(), beta.size());
    out.lambda_used = lambda;
  }
  out.beta = std::move(beta);
  out.diagnostics = std::move(diag);
  return out;
}

}  // namespace

double curvature_bound(const Dataset& ds, const LossSpec& spec, double mu) {
  const double sigma_max = gram_spectral_bound(ds);
  switch (spec.kind) {
    case LossKind::squared: return 2.0 * sigma_max;
    case LossKind::logistic: return 0.25 * sigma_max;
    case LossKind::check: return mu > 0.0 ? sigma_max / mu : sigma_max;
  }
  return sigma_max;
}

FitResult fit_sign_constrained(const Dataset& ds, const LossSpec& spec,
                               const SolveOptions& opts) {
  validate_for_loss(ds, spec);
  opts.validate();
  Vec init(ds.p(), 0.0);
  if (spec.kind == LossKind::check) {
    const double sigma_max = gram_spectral_bound(ds);
    auto [beta, diag] = solve_check_continuation(ds, spec, Mode::nonneg, 0.0, std::move(init),
                                                 opts, sigma_max, false);
    return finish(ds, spec, Mode::nonneg, 0.0, std::move(beta), std::move(diag));
  }
  auto [beta, diag] = solve_smoothed(ds, spec, 0.0, Mode::nonneg, 0.0, std::move(init), opts,
                                     curvature_bound(ds, spec));
  if (spec.kind == LossKind::squared) polish_nnls(ds, beta, diag, opts.tol);
  return finish(ds, spec, Mode::nonneg, 0.0, std::move(beta), std::move(diag));
}

FitResult fit_lasso(const Dataset& ds, const LossSpec& spec, double lambda,
                    const SolveOptions& opts) {
  validate_for_loss(ds, spec);
  opts.validate();
  if (!(lambda >= 0.0)) throw std::invalid_argument("fit_lasso: lambda must be >= 0");
  Vec init(ds.p(), 0.0);
  if (spec.kind == LossKind::check) {
    const double sigma_max = gram_spectral_bound(ds);
    auto [beta, diag] = solve_check_continuation(ds, spec, Mode::l1, lambda, std::move(init),
                                                 opts, sigma_max, false);
    return finish(ds, spec, Mode::l1, lambda, std::move(beta), std::move(diag));
  }
  auto [beta, diag] = solve_smoothed(ds, spec, 0.0, Mode::l1, lambda, std::move(init), opts,
                                     curvature_bound(ds, spec));
  return finish(ds, spec, Mode::l1, lambda, std::move(beta), std::move(diag));
}

double lambda_max(const Dataset& ds, const LossSpec& spec) {
  validate_for_loss(ds, spec);
  Vec grad;
  const Vec zero(ds.p(), 0.0);
  empirical_loss_value_grad(spec, ds, zero, grad);
  return kernels::amax(grad.data(), grad.size());
}

namespace {

Dataset subset_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.design = Matrix(rows.size(), ds.p());
  out.response.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.response[r] = ds.response[rows[r]];
    for (std::size_t j = 0; j < ds.p(); ++j) out.design(r, j) = ds.design(rows[r], j);
  }
  return out;
}

bool training_folds_ok(const Dataset& ds, const std::vector<int>& fold_of, int folds) {
  // logistic CV breaks when a training part sees one class only
  for (int f = 0; f < folds; ++f) {
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (fold_of[i] == f) continue;
      (ds.response[i] == 1.0 ? has1 : has0) = true;
      if (has0 && has1) break;
    }
    if (!(has0 && has1)) return false;
  }
  return true;
}

std::vector<int> assign_folds(const Dataset& ds, const LossSpec& spec, int folds,
                              std::uint64_t seed, int& reshuffles, bool& stratified) {
  const std::size_t n = ds.n();
  std::vector<std::size_t> order(n);
  std::vector<int> fold_of(n);
  for (int attempt = 0; attempt <= 20; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed({seed, 0xF01D5ULL, static_cast<std::uint64_t>(attempt)}));
    rng.shuffle(order);
    for (std::size_t pos = 0; pos < n; ++pos)
      fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    if (spec.kind != LossKind::logistic || training_folds_ok(ds, fold_of, folds)) {
      reshuffles = attempt;
      return fold_of;
    }
  }
  // stratify: round-robin within each class, shuffled per class
  stratified = true;
  reshuffles = 20;
  std::vector<std::size_t> class0, class1;
  for (std::size_t i = 0; i < n; ++i)
    (ds.response[i] == 1.0 ? class1 : class0).push_back(i);
  Rng r0(mix_seed({seed, 0x57A70ULL, 0}));
  Rng r1(mix_seed({seed, 0x57A71ULL, 0}));
  r0.shuffle(class0);
  r1.shuffle(class1);
  std::size_t pos = 0;
  for (std::size_t i : class0) fold_of[i] = static_cast<int>(pos++ % static_cast<std::size_t>(folds));
  for (std::size_t i : class1) fold_of[i] = static_cast<int>(pos++ % static_cast<std::size_t>(folds));
  if (!training_folds_ok(ds, fold_of, folds))
    throw std::invalid_argument("cv: response classes too unbalanced to form valid folds");
  return fold_of;
}

}  // namespace

CvResult cross_validate_lambda(const Dataset& ds, const LossSpec& spec, int folds, int grid_size,
                               std::uint64_t seed, const SolveOptions& opts, bool one_se) {
  validate_for_loss(ds, spec);
  if (folds < 2) throw std::invalid_argument("cv: need folds >= 2");
  if (ds.n() < static_cast<std::size_t>(folds))
    throw std::invalid_argument("cv: need n >= folds");
  if (grid_size < 1) throw std::invalid_argument("cv: need grid_size >= 1");

  CvResult out;
  const double lmax = lambda_max(ds, spec);
  if (!(lmax > 0.0)) {
    out.lambda_star = 0.0;
    return out;
  }
  Vec grid(grid_size);
  for (int i = 0; i < grid_size; ++i)
    grid[i] = grid_size == 1
                  ? lmax
                  : lmax * std::pow(kGridRatio, static_cast<double>(i) /
                                                    static_cast<double>(grid_size - 1));

  const auto fold_of = assign_folds(ds, spec, folds, seed, out.reshuffles, out.stratified);

  // cheaper inner solves: CV only needs the coefficient path, not certificates
  SolveOptions path_opts = opts;
  path_opts.tol = std::max(opts.tol, 1e-6);
  path_opts.max_iter = std::min(opts.max_iter, 5000);

  std::vector<Vec> fold_losses(grid.size(), Vec(folds, 0.0));
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows, val_rows;
    for (std::size_t i = 0; i < ds.n(); ++i)
      (fold_of[i] == f ? val_rows : train_rows).push_back(i);
    const Dataset train = subset_rows(ds, train_rows);
    const Dataset val = subset_rows(ds, val_rows);

    const double sigma_max = gram_spectral_bound(train);
    Vec warm(ds.p(), 0.0);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      if (spec.kind == LossKind::check) {
        auto res = solve_check_continuation(train, spec, Mode::l1, grid[gi], std::move(warm),
                                            path_opts, sigma_max, true);
        warm = std::move(res.first);
      } else {
        auto res = solve_smoothed(train, spec, 0.0, Mode::l1, grid[gi], std::move(warm),
                                  path_opts,
                                  spec.kind == LossKind::squared ? 2.0 * sigma_max
                                                                 : 0.25 * sigma_max);
        warm = std::move(res.first);
      }
      fold_losses[gi][f] = empirical_loss(spec, val, warm);
    }
  }

  out.trace.resize(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const Vec& fl = fold_losses[gi];
    double mean = 0.0;
    for (double v : fl) mean += v;
    mean /= static_cast<double>(folds);
    double var = 0.0;
    for (double v : fl) var += (v - mean) * (v - mean);
    const double sd = folds > 1 ? std::sqrt(var / static_cast<double>(folds - 1)) : 0.0;
    out.trace[gi] = {grid[gi], mean, sd / std::sqrt(static_cast<double>(folds))};
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < out.trace.size(); ++gi)
    if (out.trace[gi].mean_loss < out.trace[best].mean_loss) best = gi;  // ties -> larger lambda
  if (one_se) {
    const double cutoff = out.trace[best].mean_loss + out.trace[best].se;
    for (std::size_t gi = 0; gi < out.trace.size(); ++gi)
      if (out.trace[gi].mean_loss <= cutoff) {
        best = gi;  // grid is descending: first hit is the largest lambda
        break;
      }
  }
  out.lambda_star = out.trace[best].lambda;
  return out;
}

FitResult fit_lasso_cv(const Dataset& ds, const LossSpec& spec, int folds, int grid_size,
                       std::uint64_t seed, const SolveOptions& opts, bool one_se) {
  CvResult cv = cross_validate_lambda(ds, spec, folds, grid_size, seed, opts, one_se);
  FitResult fit = fit_lasso(ds, spec, cv.lambda_star, opts);
  fit.cv_trace = cv.trace;
  fit.cv = cv;
  return fit;
}

}  // namespace signglm
