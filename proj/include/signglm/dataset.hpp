#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signglm/matrix.hpp"

namespace signglm {

// Fixed design matrix plus response vector. The empirical inner product
// (1/n) sum_i f(x_i) g(x_i) lives here: every norm and Gram entry below is
// taken under it. Immutable after construction by convention.
struct Dataset {
  Matrix design;                           // n x p
  Vec response;                            // length n
  std::vector<std::string> feature_names;  // optional, length p when present

  std::size_t n() const { return design.n_rows; }
  std::size_t p() const { return design.n_cols; }

  // n >= 1, p >= 1, all entries finite; throws std::invalid_argument otherwise.
  void validate() const;

  // Response entries all exactly 0 or 1.
  bool response_is_binary() const;
};

// p x p Gram matrix Sigma = (1/n) X^T X, or supplied analytically.
struct GramMatrix {
  Matrix sigma;

  static GramMatrix from_dataset(const Dataset& ds);

  std::size_t p() const { return sigma.n_rows; }

  // Symmetry within 1e-12 relative, nonnegative diagonal.
  void validate() const;
};

// Ordered set of feature indices in {0, ..., p-1}.
struct SupportSet {
  std::vector<std::size_t> indices;  // sorted, distinct

  SupportSet() = default;
  explicit SupportSet(std::vector<std::size_t> idx);

  std::size_t size() const { return indices.size(); }
  bool contains(std::size_t j) const;
  SupportSet complement(std::size_t p) const;
  void check_range(std::size_t p) const;

  static SupportSet parse(const std::string& comma_list);  // "0,1,2"
};

// ||f_beta||^2 under the empirical inner product: (1/n) sum_i (x_i^T beta)^2.
double empirical_norm_sq(const Dataset& ds, const Vec& beta);

// beta with entries outside S zeroed.
Vec restrict_to(const Vec& beta, const SupportSet& s, std::size_t p);

// l_q norm for q in [1, inf]; pass q = std::numeric_limits<double>::infinity()
// for the max norm. q < 1 is rejected.
double lq_norm(const Vec& beta, double q);

// quadratic form beta^T Sigma beta
double quad_form(const Matrix& sigma, const Vec& beta);

// ---- CSV ----------------------------------------------------------------

struct CsvOptions {
  // Response column: a name (requires a header row) or empty = last column.
  std::string response_column;
};

// Comma-separated, '.' decimal, one row per observation. A header row is
// detected by a non-numeric first line. Throws CsvError with row/column of
// the first offence.
struct CsvError : std::runtime_error {
  std::size_t row, column;
  CsvError(const std::string& msg, std::size_t r, std::size_t c)
      : std::runtime_error(msg), row(r), column(c) {}
};

Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

// ---- Standardization -----------------------------------------------------

// Column scaling to unit empirical second moment (1/n) sum_i x_ij^2 = 1.
// No centering: the models here carry no intercept, and centering would
// change them. Coefficients map back as beta_orig = scale .* beta_scaled.
struct Standardized {
  Dataset data;
  Vec scale;  // multiplier applied to each column (1/column norm), 1 for zero columns

  Vec unscale(const Vec& beta_scaled) const;
};

Standardized standardize(const Dataset& ds);

}  // namespace signglm
