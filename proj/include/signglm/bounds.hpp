#pragma once

#include <functional>
#include <map>
#include <optional>

#include "signglm/loss.hpp"

// The oracle-bound formulas: eps_lambda, M_lambda, the prediction bound, and
// the l_q coefficient-error bounds, plus the empirical-process diagnostics
// v(beta) and the random-search lower estimate of Z_M.

namespace signglm {

// lambda = 2 c_L C (4 sqrt(2 log(2p)/n) + sqrt(2t/n))
double lambda_rate(double c_l, double c_column, std::size_t p, std::size_t n, double t);

struct OracleBound {
  double lambda = 0.0;
  std::optional<double> t;     // tail parameter, when the rate formula was used
  double excess_at_fstar = 0.0;
  double eps_lambda = 0.0;
  double m_lambda = 0.0;                // eps_lambda / lambda, exactly
  double prediction_bound = 0.0;        // (5/4) eps_lambda
  std::map<double, double> lq_bounds;   // q -> bound on ||beta_hat - beta*||_q^q
  bool m_lambda_le_one = false;         // hypothesis status, reported not enforced
};

// eps_lambda = 4 E(f*) + (12/(c phi^2)) (1 + 3C/tau^2)^2 s* lambda^2.
// l_q bounds require excess_fstar == 0 (the f0 = f* case) and q in [1,2];
// a violating request is refused with an explanatory error.
OracleBound oracle_bounds(double margin_c, double phi_sq, double tau_sq, double c_column,
                          double s_star, double lambda, double excess_fstar,
                          const std::vector<double>& q_list = {});

// Excess risk of f_beta under the logistic model with truth beta*: the mean
// KL divergence between Bernoulli(G(x_i' beta*)) and Bernoulli(G(x_i' beta)).
double excess_risk_logistic(const Vec& beta, const Vec& true_beta, const Matrix& design);

// Expected empirical loss at beta under the logistic model with truth beta*.
double expected_loss_logistic(const Matrix& design, const Vec& true_beta, const Vec& beta);

using ExpectedLossFn = std::function<double(const Vec& beta)>;

// v(beta) - v(beta*) where v(beta) = L(f_beta) - Lbar(f_beta). Closed form
// for the logistic loss; other losses need an expected-loss evaluator.
double empirical_process_deviation(const Dataset& ds, const LossSpec& spec, const Vec& true_beta,
                                   const Vec& beta,
                                   const std::optional<ExpectedLossFn>& expected = std::nullopt);

// Lower estimate of Z_M = sup over {||beta - center||_1 <= M} of
// |v(beta) - v(beta*)|, by l1-ball random search plus local ascent. This is
// a lower bound on the supremum, never a certificate.
double sup_deviation_estimate(const Dataset& ds, const LossSpec& spec, const Vec& true_beta,
                              const Vec& center, double m_radius, std::size_t samples,
                              std::uint64_t seed,
                              const std::optional<ExpectedLossFn>& expected = std::nullopt);

}  // namespace signglm
