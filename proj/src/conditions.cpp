#include "signglm/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "signglm/linalg.hpp"
#include "signglm/rng.hpp"

namespace signglm {

namespace {

std::string direction_string(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
    if (i > 8 && v.size() > 10) {
      os << ", ...";
      break;
    }
  }
  os << ")";
  return os.str();
}

// Objective wrapper that trips on negative curvature: a PSD Gram can never
// produce a negative quadratic form.
double checked_quad_form(const Matrix& sigma, const Vec& beta, Vec* grad) {
  Vec sb;
  matvec(sigma, beta, sb);
  const double val = kernels::dot(beta.data(), sb.data(), beta.size());
  double scale = 1.0 + kernels::sum_sq(beta.data(), beta.size());
  for (std::size_t j = 0; j < sigma.n_rows; ++j) scale = std::max(scale, std::fabs(sigma(j, j)));
  if (val < -1e-10 * scale)
    throw std::domain_error("gram matrix is not positive semi-definite: negative curvature along " +
                            direction_string(beta));
  if (grad) {
    grad->resize(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) (*grad)[j] = 2.0 * sb[j];
  }
  return val;
}

// Equality-constrained stationary point on the active face of the simplex:
// solve [2 Sigma_TT, 1; 1', 0] [beta_T; nu] = [0; 1].
std::optional<Vec> simplex_face_solve(const Matrix& sigma, const std::vector<std::size_t>& t) {
  const std::size_t m = t.size();
  Matrix sys(m + 1, m + 1);
  Vec rhs(m + 1, 0.0);
  rhs[m] = 1.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) sys(a, b) = 2.0 * sigma(t[a], t[b]);
    sys(a, m) = -1.0;
    sys(m, a) = 1.0;
  }
  auto sol = linalg::solve_general(sys, rhs);
  if (!sol) return std::nullopt;
  sol->resize(m);  // drop the multiplier
  return sol;
}

}  // namespace

TauSqResult positive_eigenvalue_constant(const GramMatrix& gram, const SolveOptions& opts,
                                         std::uint64_t seed) {
  gram.validate();
  const Matrix& sigma = gram.sigma;
  const std::size_t p = sigma.n_rows;
  opts.validate();

  const SmoothFn smooth = [&sigma](const Vec& b, Vec* g) { return checked_quad_form(sigma, b, g); };
  const ProxFn prox = [](Vec& x, double) { project_simplex_inplace(x); };
  const ResidualFn residual = [](const Vec& x, const Vec& g) {
    return kkt_residual_simplex(g, x);
  };
  const double curvature = 2.0 * linalg::spectral_norm_bound(sigma);

  // start set: vertices (cheapest-diagonal ones when p is large), the uniform
  // point, and 8 seeded random points
  std::vector<Vec> starts;
  std::vector<std::size_t> vertex_order(p);
  for (std::size_t j = 0; j < p; ++j) vertex_order[j] = j;
  std::sort(vertex_order.begin(), vertex_order.end(),
            [&](std::size_t a, std::size_t b) { return sigma(a, a) < sigma(b, b); });
  const std::size_t n_vertices = std::min<std::size_t>(p, 48);
  for (std::size_t k = 0; k < n_vertices; ++k) {
    Vec v(p, 0.0);
    v[vertex_order[k]] = 1.0;
    starts.push_back(std::move(v));
  }
  starts.emplace_back(p, 1.0 / static_cast<double>(p));
  Rng rng(mix_seed({seed, 0x7A05ULL}));
  for (int k = 0; k < 8; ++k) {
    Vec v(p);
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      v[j] = -std::log(rng.uniform01());
      total += v[j];
    }
    kernels::scal(1.0 / total, v.data(), p);
    starts.push_back(std::move(v));
  }

  TauSqResult best;
  best.tau_sq = std::numeric_limits<double>::infinity();
  SolveOptions qp_opts = opts;
  qp_opts.init_curvature = curvature;
  for (auto& s0 : starts) {
    auto [x, diag] = accelerated_proximal_gradient(smooth, prox, residual, std::move(s0), qp_opts);
    const double val = checked_quad_form(sigma, x, nullptr);
    if (val < best.tau_sq) {
      best.tau_sq = val;
      best.certificate = std::move(x);
      best.kkt_residual = diag.kkt_residual;
    }
  }

  // active-face refinement
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < p; ++j)
    if (best.certificate[j] > 0.0) support.push_back(j);
  if (!support.empty()) {
    if (auto face = simplex_face_solve(sigma, support)) {
      bool feasible = true;
      double sum = 0.0;
      for (double v : *face) {
        if (v < -1e-12) feasible = false;
        sum += std::max(v, 0.0);
      }
      if (feasible && sum > 0.0) {
        Vec candidate(p, 0.0);
        for (std::size_t a = 0; a < support.size(); ++a)
          candidate[support[a]] = std::max((*face)[a], 0.0) / sum;
        Vec grad;
        const double val = checked_quad_form(sigma, candidate, &grad);
        const double res = kkt_residual_simplex(grad, candidate);
        if (val <= best.tau_sq && res <= std::max(best.kkt_residual, opts.tol)) {
          best.tau_sq = val;
          best.certificate = std::move(candidate);
          best.kkt_residual = res;
        }
      }
    }
  }
  return best;
}

namespace {

// Projection for one sign pattern of the compatibility QP: the S block maps
// through the pattern onto the simplex, the complement onto the l1 ball.
ProxFn make_pattern_projection(const std::vector<std::size_t>& s_idx,
                               const std::vector<std::size_t>& sc_idx,
                               const std::vector<int>& pattern, double l) {
  return [=](Vec& x, double) {
    Vec w(s_idx.size());
    for (std::size_t a = 0; a < s_idx.size(); ++a)
      w[a] = static_cast<double>(pattern[a]) * x[s_idx[a]];
    project_simplex_inplace(w);
    for (std::size_t a = 0; a < s_idx.size(); ++a)
      x[s_idx[a]] = static_cast<double>(pattern[a]) * w[a];
    if (sc_idx.empty()) return;
    Vec u(sc_idx.size());
    for (std::size_t a = 0; a < sc_idx.size(); ++a) u[a] = x[sc_idx[a]];
    if (l > 0.0)
      project_l1_ball_inplace(u, l);
    else
      std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t a = 0; a < sc_idx.size(); ++a) x[sc_idx[a]] = u[a];
  };
}

}  // namespace

CompatibilityResult compatibility_constant(const GramMatrix& gram, const SupportSet& s, double l,
                                           const SolveOptions& opts, int exact_guard,
                                           std::uint64_t seed) {
  gram.validate();
  const Matrix& sigma = gram.sigma;
  const std::size_t p = sigma.n_rows;
  s.check_range(p);
  if (s.size() < 1) throw std::invalid_argument("compatibility: support must be nonempty");
  if (l < 0.0) throw std::invalid_argument("compatibility: L must be >= 0");
  opts.validate();

  const std::vector<std::size_t>& s_idx = s.indices;
  const std::vector<std::size_t> sc_idx = s.complement(p).indices;
  const std::size_t m = s_idx.size();

  const SmoothFn smooth = [&sigma](const Vec& b, Vec* g) { return checked_quad_form(sigma, b, g); };
  const double curvature = 2.0 * linalg::spectral_norm_bound(sigma);

  CompatibilityResult out;
  out.l_used = l;
  double best_val = std::numeric_limits<double>::infinity();
  Rng rng(mix_seed({seed, 0xC09A7ULL}));

  const bool exact = static_cast<int>(m) <= exact_guard;
  out.certified = exact;

  const auto solve_pattern = [&](const std::vector<int>& pattern) {
    const ProxFn prox = make_pattern_projection(s_idx, sc_idx, pattern, l);
    const ResidualFn residual = projection_fixed_point_residual(prox);
    SolveOptions qp_opts = opts;
    qp_opts.init_curvature = curvature;

    std::vector<Vec> starts;
    {
      Vec v(p, 0.0);
      for (std::size_t a = 0; a < m; ++a)
        v[s_idx[a]] = static_cast<double>(pattern[a]) / static_cast<double>(m);
      starts.push_back(std::move(v));
    }
    {
      Vec v(p, 0.0);
      double total = 0.0;
      Vec w(m);
      for (std::size_t a = 0; a < m; ++a) {
        w[a] = -std::log(rng.uniform01());
        total += w[a];
      }
      for (std::size_t a = 0; a < m; ++a)
        v[s_idx[a]] = static_cast<double>(pattern[a]) * w[a] / total;
      for (std::size_t a = 0; a < sc_idx.size(); ++a)
        v[sc_idx[a]] = 0.5 * l * (rng.uniform01() - 0.5) / std::max<double>(1, sc_idx.size());
      starts.push_back(std::move(v));
    }
    for (auto& s0 : starts) {
      auto [x, diag] =
          accelerated_proximal_gradient(smooth, prox, residual, std::move(s0), qp_opts);
      const double val = checked_quad_form(sigma, x, nullptr);
      if (val < best_val) {
        best_val = val;
        out.argmin = std::move(x);
      }
    }
  };

  if (exact) {
    // all sign patterns with the first coordinate fixed positive (beta -> -beta
    // symmetry maps a pattern's feasible set onto its negation's)
    const std::size_t n_patterns = m == 1 ? 1 : (std::size_t{1} << (m - 1));
    for (std::size_t code = 0; code < n_patterns; ++code) {
      std::vector<int> pattern(m, 1);
      for (std::size_t a = 1; a < m; ++a)
        pattern[a] = (code >> (a - 1)) & 1 ? -1 : 1;
      solve_pattern(pattern);
    }
  } else {
    // estimate mode: seeded random patterns only
    for (int k = 0; k < 64; ++k) {
      std::vector<int> pattern(m);
      for (std::size_t a = 0; a < m; ++a) pattern[a] = rng.next_u64() & 1 ? 1 : -1;
      pattern[0] = 1;
      solve_pattern(pattern);
    }
  }

  out.phi_sq = static_cast<double>(m) * best_val;
  return out;
}

ReBracket restricted_eigenvalue_bracket(const GramMatrix& gram, const SupportSet& s, double l,
                                        std::size_t n_cap, std::size_t samples,
                                        std::uint64_t seed) {
  gram.validate();
  const Matrix& sigma = gram.sigma;
  const std::size_t p = sigma.n_rows;
  s.check_range(p);
  if (s.size() > n_cap || n_cap > p)
    throw std::invalid_argument("re bracket: need |S| <= N <= p");
  if (l < 0.0) throw std::invalid_argument("re bracket: L must be >= 0");

  ReBracket out;
  const double lmin = linalg::smallest_eigenvalue(sigma);
  double scale = 0.0;
  for (std::size_t j = 0; j < p; ++j) scale = std::max(scale, std::fabs(sigma(j, j)));
  if (lmin < -1e-8 * std::max(1.0, scale))
    throw std::domain_error("re bracket: matrix has a negative eigenvalue (not PSD)");
  out.lower = std::max(lmin, 0.0);

  const std::vector<std::size_t>& s_idx = s.indices;
  std::vector<std::size_t> sc_idx = s.complement(p).indices;
  const std::size_t extra = n_cap - s_idx.size();

  // Rayleigh-type ratio with the top-|N\S| selection rule for script-N.
  const auto ratio_of = [&](const Vec& beta) {
    Vec sb;
    matvec(sigma, beta, sb);
    const double quad = kernels::dot(beta.data(), sb.data(), p);
    std::vector<double> off(sc_idx.size());
    for (std::size_t a = 0; a < sc_idx.size(); ++a) off[a] = std::fabs(beta[sc_idx[a]]);
    std::partial_sort(off.begin(), off.begin() + std::min(extra, off.size()), off.end(),
                      std::greater<double>());
    double nsq = 0.0;
    for (std::size_t j : s_idx) nsq += beta[j] * beta[j];
    for (std::size_t a = 0; a < std::min(extra, off.size()); ++a) nsq += off[a] * off[a];
    return nsq > 0.0 ? quad / nsq : std::numeric_limits<double>::infinity();
  };

  Rng rng(mix_seed({seed, 0x2EB2ULL}));
  const auto draw = [&](Vec& beta) {
    beta.assign(p, 0.0);
    double s_l1 = 0.0;
    for (std::size_t j : s_idx) {
      beta[j] = rng.normal();
      s_l1 += std::fabs(beta[j]);
    }
    if (s_l1 == 0.0) {
      beta[s_idx[0]] = 1.0;
      s_l1 = 1.0;
    }
    if (!sc_idx.empty() && l > 0.0) {
      double total = 0.0;
      Vec dir(sc_idx.size());
      for (std::size_t a = 0; a < sc_idx.size(); ++a) {
        dir[a] = -std::log(rng.uniform01());
        total += dir[a];
      }
      const double radius = l * s_l1 * rng.uniform01();
      for (std::size_t a = 0; a < sc_idx.size(); ++a) {
        const double sign = rng.next_u64() & 1 ? 1.0 : -1.0;
        beta[sc_idx[a]] = sign * radius * dir[a] / total;
      }
    }
  };

  Vec beta, best_beta;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    draw(beta);
    const double r = ratio_of(beta);
    if (r < best) {
      best = r;
      best_beta = beta;
    }
  }

  // local random descent around the incumbent, feasibility kept by rescaling
  // the off-support block
  double step = 0.3;
  Vec cand;
  for (int it = 0; it < 400; ++it) {
    cand = best_beta;
    for (std::size_t j = 0; j < p; ++j)
      if (rng.uniform01() < 0.3) cand[j] += step * rng.normal();
    double s_l1 = 0.0, sc_l1 = 0.0;
    for (std::size_t j : s_idx) s_l1 += std::fabs(cand[j]);
    for (std::size_t j : sc_idx) sc_l1 += std::fabs(cand[j]);
    if (s_l1 == 0.0) continue;
    if (sc_l1 > l * s_l1 && sc_l1 > 0.0) {
      const double shrink = l * s_l1 / sc_l1;
      for (std::size_t j : sc_idx) cand[j] *= shrink;
    }
    const double r = ratio_of(cand);
    if (r < best) {
      best = r;
      best_beta = cand;
      step *= 1.1;
    } else {
      step = std::max(step * 0.97, 1e-4);
    }
  }

  out.upper = std::max(best, out.lower);  // the infimum cannot sit below lambda_min
  return out;
}

double column_norm_constant(const Dataset& ds) {
  ds.validate();
  double best = 0.0;
  for (std::size_t j = 0; j < ds.p(); ++j)
    best = std::max(best, kernels::sum_sq(ds.design.col(j), ds.n()) /
                              static_cast<double>(ds.n()));
  return best;
}

void ConditionReport::check_invariants() const {
  const double slack = 1e-9 * std::max(1.0, c_column);
  if (tau_sq > c_column + slack)
    throw std::logic_error("condition report: tau^2 exceeds C");
  if (phi_sq_compat && support) {
    const double cap = static_cast<double>(support->size()) * c_column;
    if (*phi_sq_compat > cap + slack * static_cast<double>(support->size()))
      throw std::logic_error("condition report: phi^2 exceeds |S| C");
  }
  if (re_lower && re_upper && *re_lower > *re_upper + 1e-12)
    throw std::logic_error("condition report: RE bracket inverted");
}

}  // namespace signglm
