#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "signglm/dataset.hpp"

namespace signglm {

enum class LossKind { squared, logistic, check };

// Which loss l(a, y), plus smoothing configuration for the nonsmooth check
// loss. Lipschitz constants: logistic and check have c_L = 1; squared has no
// global Lipschitz constant and is flagged accordingly.
struct LossSpec {
  LossKind kind = LossKind::squared;
  double gamma = 0.5;         // check loss quantile level, in (0,1)
  double smoothing_mu0 = 1.0;  // initial Moreau smoothing parameter
  int smoothing_stages = 8;    // minimum halving stages of the continuation

  // "squared" | "logistic" | "check:<gamma>"
  static LossSpec parse(const std::string& s);
  std::string to_string() const;

  bool has_global_lipschitz() const { return kind != LossKind::squared; }
  double lipschitz() const;  // c_L; throws for squared loss
  bool is_smooth() const { return kind != LossKind::check; }

  void validate() const;
};

inline double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

inline double softplus(double x) {  // log(1 + e^x), overflow-safe
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double loss_value(const LossSpec& spec, double a, double y);

// d l / d a. At a check-loss kink the midpoint of the subdifferential
// [-gamma, 1-gamma] is returned; KKT certification uses the interval version
// below, never this selection.
double loss_grad(const LossSpec& spec, double a, double y);

// Moreau envelope of the check loss rho_gamma at z, with derivative in z.
// Exact closed form (asymmetric Huber): within mu*max(gamma,1-gamma)^2/2 of
// rho_gamma everywhere, gradient (1/mu)-Lipschitz.
std::pair<double, double> smoothed_check_value_grad(double gamma, double mu, double z);

// (1/n) sum_i l(x_i^T beta, y_i); the exact loss.
double empirical_loss(const LossSpec& spec, const Dataset& ds, const Vec& beta);

// Value and gradient of the empirical loss in beta. mu > 0 replaces the
// check loss by its Moreau envelope; ignored for smooth losses.
double empirical_loss_value_grad(const LossSpec& spec, const Dataset& ds, const Vec& beta,
                                 Vec& grad, double mu = 0.0);
double empirical_loss_smoothed(const LossSpec& spec, const Dataset& ds, const Vec& beta,
                               double mu);

// Coordinate-wise interval [glo, ghi] of achievable empirical-loss
// subgradients for the check loss; rows with |y_i - a_i| <= kink_tol*(1+|y_i|)
// contribute the full subdifferential [-gamma, 1-gamma].
void check_loss_grad_interval(double gamma, const Dataset& ds, const Vec& beta, Vec& glo,
                              Vec& ghi, double kink_tol = 1e-9);

// ---- margin constant (local quadratic curvature of the expected loss) ----

struct MarginInputs {
  double k_x = 0.0;  // max_{i,j} |x_ij|
  double k_0 = 0.0;  // max_i |f0(x_i)|
  std::optional<double> density_lower;  // check loss: inf of the response density
};

// c = (1/2) min_i inf_{|a| <= K_X + K_0} lbar_i''(a).
// logistic: curvature G(a)(1-G(a)) is unimodal with peak at 0, so the inf
// over the symmetric interval sits at the endpoints: c = G(K)(1-G(K))/2.
// check: lbar_i''(a) = g_i(a), so c = density_lower / 2; refused when the
// density bound is absent. squared: lbar'' = 2, so c = 1.
double margin_constant(const LossSpec& spec, const MarginInputs& in);

// K_X from the data: max absolute design entry.
double max_abs_design_entry(const Dataset& ds);

}  // namespace signglm
