#include "signglm/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace signglm {

void SolveOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("solve: backtracking factor must lie in (0,1)");
  if (init_curvature < 0.0) throw std::invalid_argument("solve: init_curvature must be >= 0");
}

void project_nonneg_inplace(Vec& v) {
  kernels::clamp_min_zero(v.data(), v.data(), v.size());
}

Vec project_nonneg(Vec v) {
  project_nonneg_inplace(v);
  return v;
}

namespace {

// Threshold for projecting v onto {u >= 0, sum u = r} via the sorted rule.
double simplex_threshold(const Vec& v, double r) {
  Vec sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    const double cand = (cum - r) / static_cast<double>(i + 1);
    if (sorted[i] - cand > 0.0) {
      theta = cand;
      k = i + 1;
    }
  }
  (void)k;
  return theta;
}

}  // namespace

void project_simplex_inplace(Vec& v) {
  if (v.empty()) throw std::invalid_argument("project_simplex: empty vector");
  const double theta = simplex_threshold(v, 1.0);
  for (double& x : v) x = std::max(x - theta, 0.0);
}

Vec project_simplex(Vec v) {
  project_simplex_inplace(v);
  return v;
}

void project_l1_ball_inplace(Vec& v, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("project_l1_ball: radius must be > 0");
  if (kernels::asum(v.data(), v.size()) <= r) return;
  Vec mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::fabs(v[i]);
  const double theta = simplex_threshold(mag, r);
  kernels::soft_threshold(v.data(), theta, v.data(), v.size());
}

Vec project_l1_ball(Vec v, double r) {
  project_l1_ball_inplace(v, r);
  return v;
}

namespace {

double diff_norm_sq(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double inner_diff(const Vec& g, const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * (a[i] - b[i]);
  return acc;
}

}  // namespace

std::pair<Vec, SolveDiagnostics> accelerated_proximal_gradient(
    const SmoothFn& smooth, const ProxFn& prox, const ResidualFn& residual, Vec init,
    const SolveOptions& opts, const NonsmoothValueFn& nonsmooth_value) {
  opts.validate();
  SolveDiagnostics diag;
  const auto h = [&](const Vec& x) { return nonsmooth_value ? nonsmooth_value(x) : 0.0; };

  Vec x = std::move(init);
  prox(x, 0.0);  // feasibility: projects onto the set; identity for l1 prox

  Vec grad(x.size()), grad_z(x.size()), y = x, z, trial;
  double fx = smooth(x, &grad);
  if (!std::isfinite(fx)) {
    diag.note = "non-finite objective at initial point";
    diag.final_objective = fx;
    return {x, diag};
  }
  double comp_x = fx + h(x);
  const double comp_init = comp_x;

  Vec best = x;
  double best_val = comp_x;
  double best_res = residual(x, grad);
  bool best_certified = best_res <= opts.tol;
  diag.kkt_residual = best_res;
  diag.final_objective = comp_x;
  diag.converged = best_certified;
  if (best_certified) return {best, diag};

  double curv = opts.init_curvature > 0.0 ? opts.init_curvature : 1.0;
  double t = 1.0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    diag.iterations = iter;
    const double fy = smooth(y, &grad);
    if (!std::isfinite(fy)) {
      diag.note = "non-finite objective during iteration";
      break;
    }

    // backtracking on the smooth upper model
    double fz = 0.0;
    for (;;) {
      const double step = 1.0 / curv;
      z = y;
      kernels::axpy(-step, grad.data(), z.data(), z.size());
      prox(z, step);
      fz = smooth(z, nullptr);
      const double model =
          fy + inner_diff(grad, z, y) + 0.5 * curv * diff_norm_sq(z, y);
      if (fz <= model + 1e-12 * (1.0 + std::fabs(fz))) break;
      curv /= opts.backtrack;  // shrink the step
      if (curv > 1e18) {
        diag.note = "line search underflow (step < 1e-18)";
        diag.final_objective = best_val;
        diag.kkt_residual = best_res;
        return {best, diag};
      }
    }
    if (!std::isfinite(fz)) {
      diag.note = "non-finite objective after proximal step";
      break;
    }

    const double comp_z = fz + h(z);
    smooth(z, &grad_z);
    const double res = residual(z, grad_z);

    if (comp_z < best_val) {
      best = z;
      best_val = comp_z;
      best_res = res;
    }
    if (res <= opts.tol && comp_z <= comp_init + 1e-12 * (1.0 + std::fabs(comp_init))) {
      diag.converged = true;
      diag.final_objective = comp_z;
      diag.kkt_residual = res;
      return {z, diag};
    }

    // momentum with adaptive restart
    if (opts.restart && comp_z > comp_x) {
      y = z;
      t = 1.0;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double w = (t - 1.0) / t_next;
      trial = z;
      for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + w * (z[i] - x[i]);
      y = std::move(trial);
      t = t_next;
    }
    x = z;
    comp_x = comp_z;
    curv *= 0.95;  // re-probe longer steps; backtracking corrects overshoot
  }

  diag.final_objective = best_val;
  diag.kkt_residual = best_res;
  diag.converged = false;
  return {best, diag};
}

double kkt_residual_nonneg(const Vec& grad, const Vec& beta) {
  if (grad.size() != beta.size()) throw std::invalid_argument("kkt: dimension mismatch");
  double res = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] < 0.0) throw std::invalid_argument("kkt_residual_nonneg: beta has negative entry");
    const double v = beta[j] > 0.0 ? std::fabs(grad[j]) : std::max(-grad[j], 0.0);
    res = std::max(res, v);
  }
  return res;
}

double kkt_residual_nonneg_interval(const Vec& glo, const Vec& ghi, const Vec& beta) {
  double res = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] < 0.0) throw std::invalid_argument("kkt_residual_nonneg: beta has negative entry");
    double v;
    if (beta[j] > 0.0) {
      // need 0 inside [glo, ghi]
      v = std::max({glo[j], -ghi[j], 0.0});
    } else {
      // need some admissible subgradient >= 0
      v = std::max(-ghi[j], 0.0);
    }
    res = std::max(res, v);
  }
  return res;
}

double kkt_residual_simplex(const Vec& grad, const Vec& beta) {
  double sup_max = -std::numeric_limits<double>::infinity();
  double sup_min = std::numeric_limits<double>::infinity();
  double off_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] > 0.0) {
      sup_max = std::max(sup_max, grad[j]);
      sup_min = std::min(sup_min, grad[j]);
    } else {
      off_min = std::min(off_min, grad[j]);
    }
  }
  if (!std::isfinite(sup_max)) return 0.0;  // no support: nothing to certify
  const auto value_at = [&](double nu) {
    double f = std::max(sup_max - nu, nu - sup_min);
    if (std::isfinite(off_min)) f = std::max(f, std::max(nu - off_min, 0.0));
    return f;
  };
  double best = std::numeric_limits<double>::infinity();
  for (double nu : {0.5 * (sup_max + sup_min),
                    std::isfinite(off_min) ? 0.5 * (sup_max + off_min) : sup_max, sup_max,
                    sup_min}) {
    best = std::min(best, value_at(nu));
  }
  return best;
}

double kkt_residual_lasso(const Vec& grad, const Vec& beta, double lambda) {
  double res = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    double v;
    if (beta[j] > 0.0)
      v = std::fabs(grad[j] + lambda);
    else if (beta[j] < 0.0)
      v = std::fabs(grad[j] - lambda);
    else
      v = std::max(std::fabs(grad[j]) - lambda, 0.0);
    res = std::max(res, v);
  }
  return res;
}

double kkt_residual_lasso_interval(const Vec& glo, const Vec& ghi, const Vec& beta,
                                   double lambda) {
  double res = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    double v;
    if (beta[j] > 0.0) {
      // need -lambda inside [glo, ghi]
      v = std::max({glo[j] + lambda, -lambda - ghi[j], 0.0});
    } else if (beta[j] < 0.0) {
      v = std::max({glo[j] - lambda, lambda - ghi[j], 0.0});
    } else {
      // need [glo, ghi] to meet [-lambda, lambda]
      v = std::max({glo[j] - lambda, -lambda - ghi[j], 0.0});
    }
    res = std::max(res, v);
  }
  return res;
}

ResidualFn projection_fixed_point_residual(ProxFn project) {
  return [project = std::move(project)](const Vec& x, const Vec& grad) {
    Vec step = x;
    kernels::axpy(-1.0, grad.data(), step.data(), step.size());
    project(step, 1.0);
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::fabs(x[i] - step[i]));
    return res;
  };
}

}  // namespace signglm
