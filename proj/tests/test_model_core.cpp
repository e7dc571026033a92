#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "signglm/dataset.hpp"

using namespace signglm;

namespace {

std::mt19937_64 gen(123);

double unif(double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

Dataset random_dataset(std::size_t n, std::size_t p) {
  Dataset ds;
  ds.design = Matrix(n, p);
  for (auto& v : ds.design.data) v = unif(-2.0, 2.0);
  ds.response.resize(n);
  for (auto& v : ds.response) v = unif(-1.0, 1.0);
  return ds;
}

}  // namespace

TEST_CASE("empirical norm: zero coefficient vector") {
  const Dataset ds = random_dataset(6, 4);
  CHECK(empirical_norm_sq(ds, Vec(4, 0.0)) == 0.0);
}

TEST_CASE("empirical norm: scaled identity design gives unit column norm") {
  const std::size_t n = 3;
  Dataset ds;
  ds.design = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) ds.design(i, i) = std::sqrt(static_cast<double>(n));
  ds.response.assign(n, 0.0);
  Vec e1(n, 0.0);
  e1[0] = 1.0;
  CHECK(empirical_norm_sq(ds, e1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("empirical norm equals beta' Sigma beta (dense oracle)") {
  const Dataset ds = random_dataset(5, 3);
  const Vec beta = {1.0, -2.0, 0.5};
  const GramMatrix gram = GramMatrix::from_dataset(ds);
  const double direct = oracle::quad_form_reference(gram.sigma, beta);
  CHECK(empirical_norm_sq(ds, beta) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("empirical norm vs Gram quadratic form on 100 random instances") {
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(gen() % 12);
    const std::size_t p = 1 + static_cast<std::size_t>(gen() % 8);
    const Dataset ds = random_dataset(n, p);
    Vec beta(p);
    for (auto& v : beta) v = unif(-3.0, 3.0);
    const GramMatrix gram = GramMatrix::from_dataset(ds);
    const double via_gram = oracle::quad_form_reference(gram.sigma, beta);
    CHECK(empirical_norm_sq(ds, beta) ==
          doctest::Approx(via_gram).epsilon(1e-10).scale(1.0 + std::fabs(via_gram)));
  }
}

TEST_CASE("restrict: examples and partition identity") {
  const Vec beta = {1.0, 2.0, 3.0};
  CHECK(restrict_to(beta, SupportSet({0, 2}), 3) == Vec{1.0, 0.0, 3.0});
  CHECK(restrict_to(beta, SupportSet({0, 1, 2}), 3) == beta);
  CHECK(restrict_to(beta, SupportSet{}, 3) == Vec{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(restrict_to(beta, SupportSet({5}), 3), std::out_of_range);

  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t p = 1 + gen() % 10;
    Vec b(p);
    for (auto& v : b) v = unif(-4.0, 4.0);
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < p; ++j)
      if (gen() & 1) idx.push_back(j);
    const SupportSet s(idx);
    const Vec bs = restrict_to(b, s, p);
    const Vec bc = restrict_to(b, s.complement(p), p);
    for (std::size_t j = 0; j < p; ++j) CHECK(bs[j] + bc[j] == b[j]);  // exact partition
    CHECK(restrict_to(bs, s, p) == bs);                                // idempotent
    CHECK(lq_norm(b, 1.0) ==
          doctest::Approx(lq_norm(bs, 1.0) + lq_norm(bc, 1.0)).epsilon(1e-15));
  }
}

TEST_CASE("lq norms: examples") {
  CHECK(lq_norm({3.0, 4.0}, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(lq_norm({1.0, -1.0, 1.0}, 1.0) == 3.0);
  // (1 + 2^1.5)^(1/1.5), frozen from an mpmath evaluation
  CHECK(lq_norm({1.0, -2.0}, 1.5) == doctest::Approx(2.4472608147714755).epsilon(1e-15));
  CHECK(lq_norm({1.0, -5.0, 2.0}, std::numeric_limits<double>::infinity()) == 5.0);
  CHECK_THROWS_AS(lq_norm({1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("lq norms: monotonicity and triangle inequality (property)") {
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t p = 1 + gen() % 12;
    Vec a(p), b(p), sum(p);
    for (std::size_t j = 0; j < p; ++j) {
      a[j] = unif(-3.0, 3.0);
      b[j] = unif(-3.0, 3.0);
      sum[j] = a[j] + b[j];
    }
    CHECK(lq_norm(a, 2.0) <= lq_norm(a, 1.0) + 1e-12);
    for (double q : {1.0, 1.5, 2.0, std::numeric_limits<double>::infinity()}) {
      CHECK(lq_norm(sum, q) <= lq_norm(a, q) + lq_norm(b, q) + 1e-12);
    }
  }
}

TEST_CASE("gram matrix validation") {
  const Dataset ds = random_dataset(8, 4);
  GramMatrix gram = GramMatrix::from_dataset(ds);
  gram.validate();
  gram.sigma(0, 1) += 1.0;  // break symmetry
  CHECK_THROWS_AS(gram.validate(), std::invalid_argument);
}

TEST_CASE("dataset validation rejects bad shapes and non-finite entries") {
  Dataset ds = random_dataset(4, 2);
  ds.validate();
  Dataset bad = ds;
  bad.design(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ds;
  bad.response.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(Dataset{Matrix(2, 1), {0.0, 1.0}, {}}.response_is_binary());
  CHECK_FALSE(Dataset{Matrix(2, 1), {0.0, 1.5}, {}}.response_is_binary());
}

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/signglm_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("csv: headered file with named response column") {
  const auto path = write_temp("a.csv", "x1,y,x2\n1,10,2\n3,20,4\n5,30,6\n");
  const Dataset ds = load_csv(path, {"y"});
  CHECK(ds.n() == 3);
  CHECK(ds.p() == 2);
  CHECK(ds.response == Vec{10.0, 20.0, 30.0});
  CHECK(ds.design(1, 0) == 3.0);
  CHECK(ds.design(1, 1) == 4.0);
  CHECK(ds.feature_names == std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("csv: headerless file takes the last column as response") {
  const auto path = write_temp("b.csv", "1,2,0\n3,4,1\n");
  const Dataset ds = load_csv(path);
  CHECK(ds.p() == 2);
  CHECK(ds.response == Vec{0.0, 1.0});
}

TEST_CASE("csv: malformed cell reports row and column") {
  const auto path = write_temp("c.csv", "1,2\n3,oops\n");
  try {
    load_csv(path);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row == 2);
    CHECK(e.column == 2);
  }
}

TEST_CASE("csv: inconsistent column count and missing named column are errors") {
  const auto p1 = write_temp("d.csv", "1,2\n3,4,5\n");
  CHECK_THROWS_AS(load_csv(p1), CsvError);
  const auto p2 = write_temp("e.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(load_csv(p2, {"zz"}), CsvError);
}

TEST_CASE("standardize scales columns to unit empirical second moment") {
  Dataset ds = random_dataset(20, 5);
  const Standardized st = standardize(ds);
  for (std::size_t j = 0; j < ds.p(); ++j) {
    const double m2 =
        kernels::sum_sq(st.data.design.col(j), ds.n()) / static_cast<double>(ds.n());
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  // fitted values are invariant: X beta_orig == X_std beta_std
  Vec beta_std(ds.p());
  for (auto& v : beta_std) v = unif(-1.0, 1.0);
  const Vec beta_orig = st.unscale(beta_std);
  Vec f1, f2;
  matvec(ds.design, beta_orig, f1);
  matvec(st.data.design, beta_std, f2);
  for (std::size_t i = 0; i < ds.n(); ++i)
    CHECK(f1[i] == doctest::Approx(f2[i]).epsilon(1e-12));
}

TEST_CASE("standardize leaves all-zero columns alone") {
  Dataset ds = random_dataset(10, 3);
  for (std::size_t i = 0; i < ds.n(); ++i) ds.design(i, 1) = 0.0;
  const Standardized st = standardize(ds);
  CHECK(st.scale[1] == 1.0);
  for (std::size_t i = 0; i < ds.n(); ++i) CHECK(st.data.design(i, 1) == 0.0);
}
