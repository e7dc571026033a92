#include "signglm/loss.hpp"

#include <stdexcept>

namespace signglm {

LossSpec LossSpec::parse(const std::string& s) {
  LossSpec spec;
  if (s == "squared") {
    spec.kind = LossKind::squared;
  } else if (s == "logistic") {
    spec.kind = LossKind::logistic;
  } else if (s.rfind("check:", 0) == 0) {
    spec.kind = LossKind::check;
    std::size_t pos = 0;
    const std::string g = s.substr(6);
    try {
      spec.gamma = std::stod(g, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("loss: cannot parse gamma in '" + s + "'");
    }
    if (pos != g.size()) throw std::invalid_argument("loss: trailing junk in '" + s + "'");
  } else {
    throw std::invalid_argument("loss: unknown spec '" + s +
                                "' (expected squared | logistic | check:<gamma>)");
  }
  spec.validate();
  return spec;
}

std::string LossSpec::to_string() const {
  switch (kind) {
    case LossKind::squared: return "squared";
    case LossKind::logistic: return "logistic";
    case LossKind::check: return "check:" + std::to_string(gamma);
  }
  return "?";
}

double LossSpec::lipschitz() const {
  if (!has_global_lipschitz())
    throw std::domain_error("squared loss has no global Lipschitz constant c_L");
  return 1.0;
}

void LossSpec::validate() const {
  if (kind == LossKind::check && !(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("check loss: gamma must lie in (0,1)");
  if (smoothing_mu0 < 0.0) throw std::invalid_argument("loss: smoothing mu0 must be >= 0");
  if (smoothing_stages < 1) throw std::invalid_argument("loss: smoothing stages must be >= 1");
}

namespace {

void check_logistic_response(double y) {
  if (y != 0.0 && y != 1.0)
    throw std::invalid_argument("logistic loss: response must be exactly 0 or 1");
}

inline double check_rho(double gamma, double z) {
  return z > 0.0 ? gamma * z : (gamma - 1.0) * z;
}

}  // namespace

double loss_value(const LossSpec& spec, double a, double y) {
  switch (spec.kind) {
    case LossKind::squared: {
      const double r = y - a;
      return r * r;
    }
    case LossKind::logistic:
      check_logistic_response(y);
      return softplus(-a) + (1.0 - y) * a;
    case LossKind::check:
      return check_rho(spec.gamma, y - a);
  }
  return 0.0;
}

double loss_grad(const LossSpec& spec, double a, double y) {
  switch (spec.kind) {
    case LossKind::squared:
      return 2.0 * (a - y);
    case LossKind::logistic:
      check_logistic_response(y);
      return sigmoid(a) - y;
    case LossKind::check: {
      const double z = y - a;
      if (z > 0.0) return -spec.gamma;
      if (z < 0.0) return 1.0 - spec.gamma;
      return (1.0 - 2.0 * spec.gamma) / 2.0;  // midpoint of [-gamma, 1-gamma]
    }
  }
  return 0.0;
}

std::pair<double, double> smoothed_check_value_grad(double gamma, double mu, double z) {
  if (!(mu > 0.0)) throw std::invalid_argument("smoothed check loss: mu must be > 0");
  if (z > mu * gamma) return {gamma * z - mu * gamma * gamma / 2.0, gamma};
  const double om = 1.0 - gamma;
  if (z < -mu * om) return {-om * z - mu * om * om / 2.0, -om};
  return {z * z / (2.0 * mu), z / mu};
}

namespace {

// Shared streaming pass: fitted values, then per-row value/derivative.
template <class RowFn>
double stream_rows(const Dataset& ds, const Vec& beta, Vec* deriv, RowFn row) {
  if (beta.size() != ds.p()) throw std::invalid_argument("empirical loss: dimension mismatch");
  Vec fitted;
  matvec(ds.design, beta, fitted);
  const std::size_t n = ds.n();
  double total = 0.0;
  if (deriv) deriv->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    total += row(fitted[i], ds.response[i], d);
    if (deriv) (*deriv)[i] = d;
  }
  return total / static_cast<double>(n);
}

}  // namespace

double empirical_loss(const LossSpec& spec, const Dataset& ds, const Vec& beta) {
  return stream_rows(ds, beta, nullptr, [&](double a, double y, double&) {
    return loss_value(spec, a, y);
  });
}

double empirical_loss_smoothed(const LossSpec& spec, const Dataset& ds, const Vec& beta,
                               double mu) {
  if (spec.kind != LossKind::check || mu <= 0.0) return empirical_loss(spec, ds, beta);
  return stream_rows(ds, beta, nullptr, [&](double a, double y, double&) {
    return smoothed_check_value_grad(spec.gamma, mu, y - a).first;
  });
}

double empirical_loss_value_grad(const LossSpec& spec, const Dataset& ds, const Vec& beta,
                                 Vec& grad, double mu) {
  Vec deriv;  // d l_i / d a_i
  double value;
  if (spec.kind == LossKind::check && mu > 0.0) {
    value = stream_rows(ds, beta, &deriv, [&](double a, double y, double& d) {
      const auto [v, dz] = smoothed_check_value_grad(spec.gamma, mu, y - a);
      d = -dz;  // chain rule through z = y - a
      return v;
    });
  } else {
    value = stream_rows(ds, beta, &deriv, [&](double a, double y, double& d) {
      d = loss_grad(spec, a, y);
      return loss_value(spec, a, y);
    });
  }
  matvec_t(ds.design, deriv, grad);
  kernels::scal(1.0 / static_cast<double>(ds.n()), grad.data(), grad.size());
  return value;
}

void check_loss_grad_interval(double gamma, const Dataset& ds, const Vec& beta, Vec& glo,
                              Vec& ghi, double kink_tol) {
  if (beta.size() != ds.p()) throw std::invalid_argument("grad interval: dimension mismatch");
  Vec fitted;
  matvec(ds.design, beta, fitted);
  const std::size_t n = ds.n(), p = ds.p();
  glo.assign(p, 0.0);
  ghi.assign(p, 0.0);
  const double om = 1.0 - gamma;
  for (std::size_t j = 0; j < p; ++j) {
    const double* xj = ds.design.col(j);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = ds.response[i] - fitted[i];
      const double tol_i = kink_tol * (1.0 + std::fabs(ds.response[i]));
      if (z > tol_i) {
        lo += -gamma * xj[i];
        hi += -gamma * xj[i];
      } else if (z < -tol_i) {
        lo += om * xj[i];
        hi += om * xj[i];
      } else {  // kink: d l / d a ranges over [-gamma, 1-gamma]
        if (xj[i] >= 0.0) {
          lo += -gamma * xj[i];
          hi += om * xj[i];
        } else {
          lo += om * xj[i];
          hi += -gamma * xj[i];
        }
      }
    }
    glo[j] = lo / static_cast<double>(n);
    ghi[j] = hi / static_cast<double>(n);
  }
}

double margin_constant(const LossSpec& spec, const MarginInputs& in) {
  if (!std::isfinite(in.k_x) || !std::isfinite(in.k_0) || in.k_x < 0.0 || in.k_0 < 0.0)
    throw std::invalid_argument("margin: K_X and K_0 must be finite and >= 0");
  switch (spec.kind) {
    case LossKind::logistic: {
      const double k = in.k_x + in.k_0;
      const double g = sigmoid(k);
      return 0.5 * g * (1.0 - g);
    }
    case LossKind::check: {
      if (!in.density_lower || !(*in.density_lower > 0.0))
        throw std::invalid_argument(
            "margin unavailable: check loss needs a positive response-density lower bound");
      return 0.5 * (*in.density_lower);
    }
    case LossKind::squared:
      return 1.0;  // lbar'' = 2 everywhere
  }
  return 0.0;
}

double max_abs_design_entry(const Dataset& ds) {
  return kernels::amax(ds.design.data.data(), ds.design.data.size());
}

}  // namespace signglm
