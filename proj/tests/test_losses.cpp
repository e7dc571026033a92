#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "signglm/loss.hpp"

using namespace signglm;

namespace {

std::mt19937_64 gen(2024);
double unif(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

}  // namespace

TEST_CASE("loss spec parsing") {
  CHECK(LossSpec::parse("squared").kind == LossKind::squared);
  CHECK(LossSpec::parse("logistic").kind == LossKind::logistic);
  const LossSpec check = LossSpec::parse("check:0.3");
  CHECK(check.kind == LossKind::check);
  CHECK(check.gamma == doctest::Approx(0.3));
  CHECK_THROWS_AS(LossSpec::parse("check:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::parse("check:0"), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::parse("hinge"), std::invalid_argument);
  CHECK(LossSpec::parse("logistic").lipschitz() == 1.0);
  CHECK(LossSpec::parse("check:0.8").lipschitz() == 1.0);
  CHECK_FALSE(LossSpec::parse("squared").has_global_lipschitz());
  CHECK_THROWS_AS(LossSpec::parse("squared").lipschitz(), std::domain_error);
}

TEST_CASE("loss values: pinned examples") {
  const LossSpec logistic = LossSpec::parse("logistic");
  CHECK(loss_value(logistic, 0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // log(1 + e^2), frozen from an mpmath evaluation
  CHECK(loss_value(logistic, 2.0, 0.0) == doctest::Approx(2.1269280110429725).epsilon(1e-15));
  CHECK_THROWS_AS(loss_value(logistic, 0.3, 0.5), std::invalid_argument);

  const LossSpec check = LossSpec::parse("check:0.5");
  CHECK(loss_value(check, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(loss_value(check, 0.0, -1.0) == doctest::Approx(0.5));

  const LossSpec squared = LossSpec::parse("squared");
  CHECK(loss_value(squared, 1.0, 3.0) == 4.0);
}

TEST_CASE("loss gradients: pinned examples") {
  const LossSpec logistic = LossSpec::parse("logistic");
  CHECK(loss_grad(logistic, 0.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  // G(1.5), frozen from an mpmath evaluation
  CHECK(loss_grad(logistic, 1.5, 0.0) == doctest::Approx(0.8175744761936437).epsilon(1e-15));

  const LossSpec check3 = LossSpec::parse("check:0.3");
  CHECK(loss_grad(check3, -1.0, 1.0) == doctest::Approx(-0.3));   // y - a = 2 > 0
  CHECK(loss_grad(check3, 1.0, 0.0) == doctest::Approx(0.7));     // y - a < 0
  CHECK(loss_grad(check3, 1.0, 1.0) == doctest::Approx((1.0 - 0.6) / 2.0));  // kink midpoint
}

TEST_CASE("logistic and check gradients match finite differences (1000 points)") {
  const LossSpec logistic = LossSpec::parse("logistic");
  for (int k = 0; k < 1000; ++k) {
    const double a = unif(-6.0, 6.0);
    const double y = (gen() & 1) ? 1.0 : 0.0;
    const double fd = oracle::central_diff(
        [&](double t) { return loss_value(logistic, t, y); }, a);
    CHECK(std::fabs(loss_grad(logistic, a, y) - fd) <= 1e-5);
  }
  for (int k = 0; k < 1000; ++k) {
    const double gamma = unif(0.1, 0.9), mu = unif(0.05, 2.0), z = unif(-4.0, 4.0);
    const auto [v, g] = smoothed_check_value_grad(gamma, mu, z);
    (void)v;
    const double fd = oracle::central_diff(
        [&](double t) { return smoothed_check_value_grad(gamma, mu, t).first; }, z);
    CHECK(std::fabs(g - fd) <= 1e-5);
  }
}

TEST_CASE("Lipschitz property |l(a,y)-l(b,y)| <= c_L |a-b|") {
  const LossSpec logistic = LossSpec::parse("logistic");
  const LossSpec check = LossSpec::parse("check:0.25");
  for (int k = 0; k < 500; ++k) {
    const double a = unif(-8.0, 8.0), b = unif(-8.0, 8.0);
    const double y = (gen() & 1) ? 1.0 : 0.0;
    CHECK(std::fabs(loss_value(logistic, a, y) - loss_value(logistic, b, y)) <=
          std::fabs(a - b) + 1e-12);
    const double yc = unif(-5.0, 5.0);
    CHECK(std::fabs(loss_value(check, a, yc) - loss_value(check, b, yc)) <=
          std::fabs(a - b) + 1e-12);
  }
}

TEST_CASE("midpoint convexity on random triples (all losses)") {
  for (const char* name : {"squared", "logistic", "check:0.7"}) {
    const LossSpec spec = LossSpec::parse(name);
    for (int k = 0; k < 500; ++k) {
      const double a = unif(-5.0, 5.0), b = unif(-5.0, 5.0);
      const double y = spec.kind == LossKind::logistic ? ((gen() & 1) ? 1.0 : 0.0)
                                                       : unif(-3.0, 3.0);
      const double mid = loss_value(spec, 0.5 * (a + b), y);
      CHECK(mid <= 0.5 * (loss_value(spec, a, y) + loss_value(spec, b, y)) + 1e-12);
    }
  }
}

TEST_CASE("smoothed check loss: pinned values and envelope bound") {
  // symmetric case at the kink
  const auto [v0, g0] = smoothed_check_value_grad(0.5, 0.7, 0.0);
  CHECK(v0 == 0.0);
  CHECK(g0 == 0.0);
  // gamma=0.5, mu=1, z=10: rho - mu gamma^2/2 = 5 - 0.125
  const auto [v1, g1] = smoothed_check_value_grad(0.5, 1.0, 10.0);
  CHECK(v1 == doctest::Approx(4.875).epsilon(1e-15));
  CHECK(g1 == doctest::Approx(0.5));
  // mu -> 0 recovers the exact check loss
  const auto [v2, g2] = smoothed_check_value_grad(0.3, 1e-12, 2.0);
  (void)g2;
  CHECK(v2 == doctest::Approx(0.6).epsilon(1e-9));
  CHECK_THROWS_AS(smoothed_check_value_grad(0.5, 0.0, 1.0), std::invalid_argument);

  // envelope bound: 0 <= rho - e_mu <= mu max(gamma,1-gamma)^2/2 for all z
  for (int k = 0; k < 2000; ++k) {
    const double gamma = unif(0.05, 0.95), mu = unif(0.01, 3.0), z = unif(-6.0, 6.0);
    const double rho = z > 0.0 ? gamma * z : (gamma - 1.0) * z;
    const double env = smoothed_check_value_grad(gamma, mu, z).first;
    const double cap = mu * std::pow(std::max(gamma, 1.0 - gamma), 2) / 2.0;
    CHECK(rho - env >= -1e-12);
    CHECK(rho - env <= cap + 1e-12);
    CHECK(std::fabs(smoothed_check_value_grad(gamma, mu, z).second) <=
          std::max(gamma, 1.0 - gamma) + 1e-12);
  }
}

namespace {

Dataset tiny_dataset(std::size_t n, std::size_t p, bool binary) {
  Dataset ds;
  ds.design = Matrix(n, p);
  for (auto& v : ds.design.data) v = unif(-1.5, 1.5);
  ds.response.resize(n);
  for (auto& v : ds.response) v = binary ? ((gen() & 1) ? 1.0 : 0.0) : unif(-2.0, 2.0);
  return ds;
}

}  // namespace

TEST_CASE("empirical loss: logistic at beta = 0 is log 2 regardless of data") {
  const Dataset ds = tiny_dataset(17, 3, true);
  CHECK(empirical_loss(LossSpec::parse("logistic"), ds, Vec(3, 0.0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("empirical loss: check gamma=1/2 at beta=0 with y = (1,-1)") {
  Dataset ds;
  ds.design = Matrix(2, 1);
  ds.design(0, 0) = 0.3;
  ds.design(1, 0) = -0.7;
  ds.response = {1.0, -1.0};
  CHECK(empirical_loss(LossSpec::parse("check:0.5"), ds, Vec(1, 0.0)) == doctest::Approx(0.5));
}

TEST_CASE("empirical squared loss matches the normal-equations residual (dense oracle)") {
  // overdetermined tiny system: solve via test-local elimination
  const std::size_t n = 7, p = 3;
  const Dataset ds = tiny_dataset(n, p, false);
  std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
  Vec aty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < p; ++a) {
      aty[a] += ds.design(i, a) * ds.response[i];
      for (std::size_t b = 0; b < p; ++b) ata[a][b] += ds.design(i, a) * ds.design(i, b);
    }
  const auto beta = oracle::solve_dense(ata, aty);
  REQUIRE(beta.has_value());
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < p; ++j) fit += ds.design(i, j) * (*beta)[j];
    rss += (ds.response[i] - fit) * (ds.response[i] - fit);
  }
  CHECK(empirical_loss(LossSpec::parse("squared"), ds, *beta) ==
        doctest::Approx(rss / static_cast<double>(n)).epsilon(1e-12));
}

TEST_CASE("empirical loss is convex along random segments") {
  for (const char* name : {"squared", "logistic", "check:0.4"}) {
    const LossSpec spec = LossSpec::parse(name);
    const Dataset ds = tiny_dataset(12, 4, spec.kind == LossKind::logistic);
    for (int k = 0; k < 100; ++k) {
      Vec b1(4), b2(4), mix(4);
      const double t = unif(0.0, 1.0);
      for (std::size_t j = 0; j < 4; ++j) {
        b1[j] = unif(-2.0, 2.0);
        b2[j] = unif(-2.0, 2.0);
        mix[j] = t * b1[j] + (1.0 - t) * b2[j];
      }
      CHECK(empirical_loss(spec, ds, mix) <=
            t * empirical_loss(spec, ds, b1) + (1.0 - t) * empirical_loss(spec, ds, b2) + 1e-12);
    }
  }
}

TEST_CASE("empirical loss gradient matches finite differences in beta") {
  for (const char* name : {"squared", "logistic"}) {
    const LossSpec spec = LossSpec::parse(name);
    const Dataset ds = tiny_dataset(9, 3, spec.kind == LossKind::logistic);
    Vec beta = {0.3, -0.2, 0.7};
    Vec grad;
    empirical_loss_value_grad(spec, ds, beta, grad);
    for (std::size_t j = 0; j < 3; ++j) {
      const double fd = oracle::central_diff(
          [&](double t) {
            Vec b = beta;
            b[j] = t;
            return empirical_loss(spec, ds, b);
          },
          beta[j]);
      CHECK(std::fabs(grad[j] - fd) <= 1e-6 * (1.0 + std::fabs(fd)));
    }
  }
}

TEST_CASE("margin constant: logistic endpoints and check density rule") {
  const LossSpec logistic = LossSpec::parse("logistic");
  CHECK(margin_constant(logistic, {0.0, 0.0, {}}) == doctest::Approx(0.125).epsilon(1e-15));
  // 0.5 G(2)(1-G(2)), frozen from an mpmath evaluation
  CHECK(margin_constant(logistic, {1.5, 0.5, {}}) ==
        doctest::Approx(0.052496792701753259).epsilon(1e-14));

  const LossSpec check = LossSpec::parse("check:0.5");
  CHECK(margin_constant(check, {1.0, 1.0, 0.25}) == doctest::Approx(0.125));
  CHECK_THROWS_WITH_AS(margin_constant(check, {1.0, 1.0, {}}),
                       doctest::Contains("margin unavailable"), std::invalid_argument);

  CHECK(margin_constant(LossSpec::parse("squared"), {3.0, 2.0, {}}) == 1.0);
}

TEST_CASE("check margin against a discretized density oracle") {
  // E rho_gamma(Y - a) for Y ~ Uniform(-2, 2): second derivative in a is the
  // density g(a) = 1/4 on the interval, so c = density/2 = 0.125
  const double gamma = 0.3;
  const auto expected_loss = [&](double a) {
    const int grid = 20000;
    double total = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double y = -2.0 + 4.0 * (i + 0.5) / grid;
      const double z = y - a;
      total += z > 0.0 ? gamma * z : (gamma - 1.0) * z;
    }
    return total / grid;
  };
  const double h = 1e-3;
  const double second = (expected_loss(h) - 2.0 * expected_loss(0.0) + expected_loss(-h)) / (h * h);
  CHECK(second == doctest::Approx(0.25).epsilon(0.02));
  CHECK(margin_constant(LossSpec::parse("check:0.3"), {1.0, 1.0, 0.25}) ==
        doctest::Approx(second / 2.0).epsilon(0.02));
}

TEST_CASE("check-loss subgradient interval brackets the midpoint selection") {
  const Dataset ds = tiny_dataset(10, 3, false);
  Vec beta = {0.2, 0.0, -0.4};
  Vec glo, ghi, grad;
  const LossSpec spec = LossSpec::parse("check:0.35");
  check_loss_grad_interval(spec.gamma, ds, beta, glo, ghi);
  empirical_loss_value_grad(spec, ds, beta, grad);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(glo[j] <= ghi[j]);
    CHECK(grad[j] >= glo[j] - 1e-12);
    CHECK(grad[j] <= ghi[j] + 1e-12);
  }
}

TEST_CASE("K_X helper is the max absolute design entry") {
  Dataset ds = tiny_dataset(6, 2, false);
  ds.design(3, 1) = -7.25;
  CHECK(max_abs_design_entry(ds) == 7.25);
}
