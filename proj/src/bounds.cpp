#include "signglm/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "signglm/rng.hpp"

namespace signglm {

double lambda_rate(double c_l, double c_column, std::size_t p, std::size_t n, double t) {
  if (!(c_l > 0.0 && c_column > 0.0 && p >= 1 && n >= 1 && t > 0.0))
    throw std::invalid_argument("lambda_rate: all inputs must be positive");
  const double nd = static_cast<double>(n);
  return 2.0 * c_l * c_column *
         (4.0 * std::sqrt(2.0 * std::log(2.0 * static_cast<double>(p)) / nd) +
          std::sqrt(2.0 * t / nd));
}

OracleBound oracle_bounds(double margin_c, double phi_sq, double tau_sq, double c_column,
                          double s_star, double lambda, double excess_fstar,
                          const std::vector<double>& q_list) {
  if (!(margin_c > 0.0 && phi_sq > 0.0 && tau_sq > 0.0 && lambda > 0.0))
    throw std::invalid_argument("oracle_bounds: margin c, phi^2, tau^2 and lambda must be > 0");
  if (!(s_star >= 0.0)) throw std::invalid_argument("oracle_bounds: s* must be >= 0");
  if (tau_sq > c_column * (1.0 + 1e-12))
    throw std::invalid_argument("oracle_bounds: tau^2 cannot exceed C");
  if (!(excess_fstar >= 0.0))
    throw std::invalid_argument("oracle_bounds: excess risk must be >= 0");

  OracleBound out;
  out.lambda = lambda;
  out.excess_at_fstar = excess_fstar;
  const double ratio = 1.0 + 3.0 * c_column / tau_sq;
  const double kappa = 12.0 / (margin_c * phi_sq) * ratio * ratio;
  out.eps_lambda = 4.0 * excess_fstar + kappa * s_star * lambda * lambda;
  out.m_lambda = out.eps_lambda / lambda;
  out.prediction_bound = 1.25 * out.eps_lambda;
  out.m_lambda_le_one = out.m_lambda <= 1.0;

  if (!q_list.empty()) {
    if (excess_fstar != 0.0)
      throw std::invalid_argument(
          "oracle_bounds: l_q bounds need excess risk at f* equal to zero -- the l_q theorem "
          "covers only the case f0 = f*");
    for (double q : q_list) {
      if (!(q >= 1.0 && q <= 2.0))
        throw std::invalid_argument("oracle_bounds: l_q bounds require q in [1,2]");
      out.lq_bounds[q] = std::pow(kappa, q) * s_star * std::pow(lambda, q);
    }
  }
  return out;
}

double excess_risk_logistic(const Vec& beta, const Vec& true_beta, const Matrix& design) {
  if (beta.size() != design.n_cols || true_beta.size() != design.n_cols)
    throw std::invalid_argument("excess_risk_logistic: dimension mismatch");
  Vec a, a_star;
  matvec(design, beta, a);
  matvec(design, true_beta, a_star);
  const std::size_t n = design.n_rows;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = sigmoid(a_star[i]);
    // KL(Bernoulli(p) || Bernoulli(G(a))), written with softplus for stability
    total += p * (softplus(-a[i]) - softplus(-a_star[i])) +
             (1.0 - p) * (softplus(a[i]) - softplus(a_star[i]));
  }
  return total / static_cast<double>(n);
}

double expected_loss_logistic(const Matrix& design, const Vec& true_beta, const Vec& beta) {
  Vec a, a_star;
  matvec(design, beta, a);
  matvec(design, true_beta, a_star);
  const std::size_t n = design.n_rows;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = sigmoid(a_star[i]);
    total += p * softplus(-a[i]) + (1.0 - p) * softplus(a[i]);
  }
  return total / static_cast<double>(n);
}

namespace {

ExpectedLossFn resolve_expected(const Dataset& ds, const LossSpec& spec, const Vec& true_beta,
                                const std::optional<ExpectedLossFn>& expected) {
  if (expected) return *expected;
  if (spec.kind == LossKind::logistic)
    return [&ds, true_beta](const Vec& b) { return expected_loss_logistic(ds.design, true_beta, b); };
  throw std::invalid_argument(
      "empirical process deviation: no closed-form expected loss for this loss; supply an "
      "evaluator");
}

}  // namespace

double empirical_process_deviation(const Dataset& ds, const LossSpec& spec, const Vec& true_beta,
                                   const Vec& beta,
                                   const std::optional<ExpectedLossFn>& expected) {
  const ExpectedLossFn lbar = resolve_expected(ds, spec, true_beta, expected);
  const double v_beta = empirical_loss(spec, ds, beta) - lbar(beta);
  const double v_star = empirical_loss(spec, ds, true_beta) - lbar(true_beta);
  return v_beta - v_star;
}

double sup_deviation_estimate(const Dataset& ds, const LossSpec& spec, const Vec& true_beta,
                              const Vec& center, double m_radius, std::size_t samples,
                              std::uint64_t seed,
                              const std::optional<ExpectedLossFn>& expected) {
  if (m_radius < 0.0) throw std::invalid_argument("sup_deviation_estimate: M must be >= 0");
  if (m_radius == 0.0) return 0.0;
  const ExpectedLossFn lbar = resolve_expected(ds, spec, true_beta, expected);
  const double v_star = empirical_loss(spec, ds, true_beta) - lbar(true_beta);
  const auto deviation = [&](const Vec& b) {
    return std::fabs(empirical_loss(spec, ds, b) - lbar(b) - v_star);
  };

  const std::size_t p = center.size();
  Rng rng(mix_seed({seed, 0x5D37ULL}));
  Vec beta(p), best_beta = center;
  double best = 0.0;

  const auto draw_direction = [&](Vec& dir) {
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      dir[j] = -std::log(rng.uniform01());
      total += dir[j];
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double sign = rng.next_u64() & 1 ? 1.0 : -1.0;
      dir[j] = sign * dir[j] / total;
    }
  };

  Vec dir(p);
  for (std::size_t k = 0; k < samples; ++k) {
    draw_direction(dir);
    // half the draws on the sphere, half uniformly scaled inward
    const double r = (k % 2 == 0) ? m_radius : m_radius * rng.uniform01();
    for (std::size_t j = 0; j < p; ++j) beta[j] = center[j] + r * dir[j];
    const double d = deviation(beta);
    if (d > best) {
      best = d;
      best_beta = beta;
    }
  }

  // local ascent around the incumbent, clipped back into the l1 ball
  double step = 0.2 * m_radius;
  Vec cand(p);
  for (int it = 0; it < 300; ++it) {
    cand = best_beta;
    for (std::size_t j = 0; j < p; ++j)
      if (rng.uniform01() < 0.5) cand[j] += step * rng.normal();
    double l1 = 0.0;
    for (std::size_t j = 0; j < p; ++j) l1 += std::fabs(cand[j] - center[j]);
    if (l1 > m_radius) {
      const double shrink = m_radius / l1;
      for (std::size_t j = 0; j < p; ++j) cand[j] = center[j] + shrink * (cand[j] - center[j]);
    }
    const double d = deviation(cand);
    if (d > best) {
      best = d;
      best_beta = cand;
      step *= 1.1;
    } else {
      step = std::max(step * 0.95, 1e-6 * m_radius);
    }
  }
  return best;
}

}  // namespace signglm
