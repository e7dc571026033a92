#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "signglm/solve.hpp"

using namespace signglm;

namespace {

std::mt19937_64 gen(99);
double unif(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

Vec random_vec(std::size_t p, double lo = -2.0, double hi = 2.0) {
  Vec v(p);
  for (auto& x : v) x = unif(lo, hi);
  return v;
}

double norm2(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("project_nonneg: definition, identity, zero") {
  CHECK(project_nonneg({1.0, -2.0, 0.0}) == Vec{1.0, 0.0, 0.0});
  CHECK(project_nonneg({0.5, 2.0}) == Vec{0.5, 2.0});
  CHECK(project_nonneg({-1.0, -0.1}) == Vec{0.0, 0.0});
}

TEST_CASE("project_simplex: fixed point, vertex, symmetry") {
  CHECK(project_simplex({0.5, 0.5}) == Vec{0.5, 0.5});
  const Vec vertex = project_simplex({2.0, 0.0});
  CHECK(vertex[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vertex[1] == doctest::Approx(0.0));
  const Vec uniform = project_simplex({1.0, 1.0, 1.0});
  for (double v : uniform) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("project_l1_ball: interior, vertex, symmetry") {
  CHECK(project_l1_ball({0.3, -0.2}, 1.0) == Vec{0.3, -0.2});
  const Vec v1 = project_l1_ball({2.0, 0.0}, 1.0);
  CHECK(v1[0] == doctest::Approx(1.0));
  CHECK(v1[1] == doctest::Approx(0.0));
  const Vec v2 = project_l1_ball({1.0, 1.0}, 1.0);
  CHECK(v2[0] == doctest::Approx(0.5));
  CHECK(v2[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(project_l1_ball({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("projections: feasibility, idempotence, non-expansiveness (property)") {
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t p = 1 + gen() % 12;
    const Vec u = random_vec(p, -4.0, 4.0), v = random_vec(p, -4.0, 4.0);
    const double r = unif(0.1, 3.0);

    const Vec pu = project_simplex(u), pv = project_simplex(v);
    double sum = 0.0;
    for (double x : pu) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm2(project_simplex(pu), pu) <= 1e-12);
    CHECK(norm2(pu, pv) <= norm2(u, v) + 1e-12);

    const Vec bu = project_l1_ball(u, r), bv = project_l1_ball(v, r);
    double l1 = 0.0;
    for (double x : bu) l1 += std::fabs(x);
    CHECK(l1 <= r * (1.0 + 1e-12));
    CHECK(norm2(project_l1_ball(bu, r), bu) <= 1e-12);
    CHECK(norm2(bu, bv) <= norm2(u, v) + 1e-12);

    const Vec nu = project_nonneg(u), nv = project_nonneg(v);
    CHECK(norm2(project_nonneg(nu), nu) == 0.0);
    CHECK(norm2(nu, nv) <= norm2(u, v) + 1e-12);
  }
}

namespace {

// engine driver for a quadratic beta' Q beta - 2 c' beta over the orthant
std::pair<Vec, SolveDiagnostics> solve_orthant_quadratic(const Matrix& q, const Vec& c,
                                                         Vec init, const SolveOptions& opts) {
  const SmoothFn smooth = [&](const Vec& b, Vec* g) {
    Vec qb;
    matvec(q, b, qb);
    if (g) {
      g->resize(b.size());
      for (std::size_t j = 0; j < b.size(); ++j) (*g)[j] = 2.0 * (qb[j] - c[j]);
    }
    double val = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) val += b[j] * qb[j] - 2.0 * c[j] * b[j];
    return val;
  };
  const ProxFn prox = [](Vec& x, double) { project_nonneg_inplace(x); };
  const ResidualFn res = [](const Vec& x, const Vec& g) { return kkt_residual_nonneg(g, x); };
  return accelerated_proximal_gradient(smooth, prox, res, std::move(init), opts);
}

}  // namespace

TEST_CASE("engine: 1-d examples over the orthant") {
  // (x-2)^2 = x^2 - 4x + 4: unconstrained optimum feasible
  Matrix q(1, 1);
  q(0, 0) = 1.0;
  auto [x1, d1] = solve_orthant_quadratic(q, {2.0}, {0.0}, {});
  CHECK(d1.converged);
  CHECK(x1[0] == doctest::Approx(2.0).epsilon(1e-7));

  // (x+1)^2: constraint active at 0
  auto [x2, d2] = solve_orthant_quadratic(q, {-1.0}, {3.0}, {});
  CHECK(d2.converged);
  CHECK(x2[0] == 0.0);
}

TEST_CASE("engine: simplex-constrained quadratic hits the symmetric point") {
  const std::size_t p = 3;
  Matrix q(p, p);
  for (std::size_t j = 0; j < p; ++j) q(j, j) = 1.0;
  const SmoothFn smooth = [&](const Vec& b, Vec* g) {
    if (g) {
      g->resize(p);
      for (std::size_t j = 0; j < p; ++j) (*g)[j] = 2.0 * b[j];
    }
    double val = 0.0;
    for (double v : b) val += v * v;
    return val;
  };
  const ProxFn prox = [](Vec& x, double) { project_simplex_inplace(x); };
  const ResidualFn res = [](const Vec& x, const Vec& g) { return kkt_residual_simplex(g, x); };
  auto [x, diag] = accelerated_proximal_gradient(smooth, prox, res, {0.9, 0.05, 0.05}, {});
  CHECK(diag.converged);
  for (double v : x) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(smooth(x, nullptr) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("engine matches the 2^p active-set oracle on random orthant quadratics") {
  gen.seed(4242);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t p = 2 + gen() % 7;  // up to 8
    const std::size_t n = p + 2 + gen() % 8;
    // PSD Q = A'A / n with random A, plus arbitrary linear term
    Matrix a(n, p);
    for (auto& v : a.data) v = unif(-1.5, 1.5);
    Matrix q(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += a(k, i) * a(k, j);
        q(i, j) = acc / static_cast<double>(n);
      }
    const Vec c = random_vec(p, -1.0, 1.0);

    const Vec expect = oracle::nonneg_quadratic_enumeration(q, c);
    SolveOptions opts;
    opts.tol = 1e-8;
    auto [got, diag] = solve_orthant_quadratic(q, c, Vec(p, 0.0), opts);
    CHECK(diag.converged);
    for (std::size_t j = 0; j < p; ++j) CHECK(std::fabs(got[j] - expect[j]) <= 1e-6);
  }
}

TEST_CASE("engine: objective at the returned point never exceeds the initial value") {
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t p = 1 + gen() % 6;
    Matrix q(p, p);
    for (std::size_t j = 0; j < p; ++j) q(j, j) = unif(0.1, 3.0);
    const Vec c = random_vec(p, -2.0, 2.0);
    const Vec init = project_nonneg(random_vec(p, 0.0, 3.0));

    const auto value = [&](const Vec& b) {
      double val = 0.0;
      for (std::size_t j = 0; j < p; ++j) val += b[j] * q(j, j) * b[j] - 2.0 * c[j] * b[j];
      return val;
    };
    SolveOptions opts;
    opts.max_iter = 5 + static_cast<int>(gen() % 40);  // force early stops sometimes
    auto [x, diag] = solve_orthant_quadratic(q, c, init, opts);
    CHECK(value(x) <= value(init) + 1e-10);
  }
}

TEST_CASE("engine aborts with a note on non-finite objectives") {
  const SmoothFn smooth = [](const Vec& b, Vec* g) {
    if (g) (*g)[0] = std::numeric_limits<double>::quiet_NaN();
    return b[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : b[0];
  };
  const ProxFn prox = [](Vec&, double) {};
  const ResidualFn res = [](const Vec&, const Vec&) { return 1.0; };
  auto [x, diag] = accelerated_proximal_gradient(smooth, prox, res, {0.6}, {});
  CHECK_FALSE(diag.converged);
  CHECK(!diag.note.empty());
}

TEST_CASE("kkt_residual_nonneg: examples and negative-entry rejection") {
  CHECK(kkt_residual_nonneg({0.0, 3.0}, {1.0, 0.0}) == 0.0);
  CHECK(kkt_residual_nonneg({-0.2, 0.0}, {0.0, 1.0}) == doctest::Approx(0.2));
  CHECK_THROWS_AS(kkt_residual_nonneg({0.0}, {-0.5}), std::invalid_argument);
}

TEST_CASE("kkt residual (interval) distinguishes admissible selections") {
  // beta > 0 with 0 inside the interval: satisfied
  CHECK(kkt_residual_nonneg_interval({-0.3}, {0.4}, {1.0}) == 0.0);
  // beta > 0 with interval strictly positive: violated by the gap
  CHECK(kkt_residual_nonneg_interval({0.2}, {0.5}, {1.0}) == doctest::Approx(0.2));
  // beta = 0 needs some subgradient >= 0
  CHECK(kkt_residual_nonneg_interval({-0.5}, {-0.1}, {0.0}) == doctest::Approx(0.1));
  CHECK(kkt_residual_nonneg_interval({-0.5}, {0.1}, {0.0}) == 0.0);
}

TEST_CASE("kkt residual for the l1 penalty") {
  CHECK(kkt_residual_lasso({-0.5, 0.2}, {1.0, 0.0}, 0.5) == 0.0);
  CHECK(kkt_residual_lasso({0.5}, {-1.0}, 0.5) == 0.0);
  CHECK(kkt_residual_lasso({0.9}, {0.0}, 0.5) == doctest::Approx(0.4));
  CHECK(kkt_residual_lasso({-0.2}, {1.0}, 0.5) == doctest::Approx(0.3));
}

TEST_CASE("simplex kkt residual is zero exactly at optimality") {
  // uniform point on x'x over simplex: grad = 2/3 on support
  CHECK(kkt_residual_simplex({2.0 / 3, 2.0 / 3, 2.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}) ==
        doctest::Approx(0.0).epsilon(1e-15));
  // vertex with smaller off-support gradient: violated
  CHECK(kkt_residual_simplex({1.0, 0.2}, {1.0, 0.0}) == doctest::Approx(0.4));
}
