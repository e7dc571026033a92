#include "signglm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace signglm {

void Dataset::validate() const {
  if (n() < 1 || p() < 1) throw std::invalid_argument("dataset: need n >= 1 and p >= 1");
  if (response.size() != n()) throw std::invalid_argument("dataset: response length != n");
  for (double v : design.data)
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite design entry");
  for (double v : response)
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite response entry");
  if (!feature_names.empty() && feature_names.size() != p())
    throw std::invalid_argument("dataset: feature_names length != p");
}

bool Dataset::response_is_binary() const {
  for (double v : response)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

GramMatrix GramMatrix::from_dataset(const Dataset& ds) {
  const std::size_t n = ds.n(), p = ds.p();
  GramMatrix g;
  g.sigma = Matrix(p, p);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k <= j; ++k) {
      const double v = inv_n * kernels::dot(ds.design.col(j), ds.design.col(k), n);
      g.sigma(j, k) = v;
      g.sigma(k, j) = v;
    }
  }
  return g;
}

void GramMatrix::validate() const {
  const std::size_t n = sigma.n_rows;
  if (sigma.n_cols != n) throw std::invalid_argument("gram: matrix not square");
  double scale = 0.0;
  for (double v : sigma.data) scale = std::max(scale, std::fabs(v));
  for (std::size_t j = 0; j < n; ++j) {
    if (sigma(j, j) < -1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("gram: negative diagonal entry");
    for (std::size_t k = 0; k < j; ++k)
      if (std::fabs(sigma(j, k) - sigma(k, j)) > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("gram: matrix not symmetric");
  }
}

SupportSet::SupportSet(std::vector<std::size_t> idx) : indices(std::move(idx)) {
  std::sort(indices.begin(), indices.end());
  const auto last = std::unique(indices.begin(), indices.end());
  if (last != indices.end()) throw std::invalid_argument("support: duplicate index");
}

bool SupportSet::contains(std::size_t j) const {
  return std::binary_search(indices.begin(), indices.end(), j);
}

SupportSet SupportSet::complement(std::size_t p) const {
  check_range(p);
  std::vector<std::size_t> out;
  out.reserve(p - indices.size());
  for (std::size_t j = 0; j < p; ++j)
    if (!contains(j)) out.push_back(j);
  return SupportSet(std::move(out));
}

void SupportSet::check_range(std::size_t p) const {
  for (std::size_t j : indices)
    if (j >= p) throw std::out_of_range("support: index out of range");
}

SupportSet SupportSet::parse(const std::string& comma_list) {
  std::vector<std::size_t> idx;
  std::stringstream ss(comma_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument("support: bad index '" + tok + "'");
    idx.push_back(static_cast<std::size_t>(v));
  }
  return SupportSet(std::move(idx));
}

double empirical_norm_sq(const Dataset& ds, const Vec& beta) {
  if (beta.size() != ds.p()) throw std::invalid_argument("empirical_norm_sq: dimension mismatch");
  Vec fitted;
  matvec(ds.design, beta, fitted);
  return kernels::sum_sq(fitted.data(), fitted.size()) / static_cast<double>(ds.n());
}

Vec restrict_to(const Vec& beta, const SupportSet& s, std::size_t p) {
  if (beta.size() != p) throw std::invalid_argument("restrict: dimension mismatch");
  s.check_range(p);
  Vec out(p, 0.0);
  for (std::size_t j : s.indices) out[j] = beta[j];
  return out;
}

double lq_norm(const Vec& beta, double q) {
  if (std::isinf(q)) return kernels::amax(beta.data(), beta.size());
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1 or infinity");
  if (q == 1.0) return kernels::asum(beta.data(), beta.size());
  if (q == 2.0) return std::sqrt(kernels::sum_sq(beta.data(), beta.size()));
  double acc = 0.0;
  for (double v : beta) acc += std::pow(std::fabs(v), q);
  return std::pow(acc, 1.0 / q);
}

double quad_form(const Matrix& sigma, const Vec& beta) {
  Vec sb;
  matvec(sigma, beta, sb);
  return kernels::dot(beta.data(), sb.data(), beta.size());
}

namespace {

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open file: " + path, 0, 0);

  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t lineno = 0;
  bool first_data_line = true;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (first_data_line) {
      // header detection: any cell that does not parse as a number
      bool all_numeric = true;
      double tmp;
      for (const auto& c : cells)
        if (!parse_double(c, tmp)) {
          all_numeric = false;
          break;
        }
      first_data_line = false;
      if (!all_numeric) {
        header = cells;
        continue;
      }
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_double(cells[c], vals[c]))
        throw CsvError("malformed numeric cell at row " + std::to_string(lineno) + ", column " +
                           std::to_string(c + 1),
                       lineno, c + 1);
    if (!rows.empty() && vals.size() != rows.front().size())
      throw CsvError("inconsistent column count at row " + std::to_string(lineno), lineno, 1);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw CsvError("no data rows in " + path, lineno, 0);
  const std::size_t ncol = rows.front().size();
  if (ncol < 2) throw CsvError("need at least one feature and one response column", 1, 1);

  std::size_t resp = ncol - 1;
  if (!opts.response_column.empty()) {
    if (header.empty())
      throw CsvError("response column named '" + opts.response_column + "' but file has no header",
                     1, 0);
    const auto it = std::find(header.begin(), header.end(), opts.response_column);
    if (it == header.end())
      throw CsvError("response column '" + opts.response_column + "' not found", 1, 0);
    resp = static_cast<std::size_t>(it - header.begin());
  }

  Dataset ds;
  const std::size_t n = rows.size(), p = ncol - 1;
  ds.design = Matrix(n, p);
  ds.response.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t jj = 0;
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c == resp)
        ds.response[i] = rows[i][c];
      else
        ds.design(i, jj++) = rows[i][c];
    }
  }
  if (!header.empty()) {
    for (std::size_t c = 0; c < ncol; ++c)
      if (c != resp) ds.feature_names.push_back(header[c]);
  }
  ds.validate();
  return ds;
}

Vec Standardized::unscale(const Vec& beta_scaled) const {
  Vec out(beta_scaled.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = beta_scaled[j] * scale[j];
  return out;
}

Standardized standardize(const Dataset& ds) {
  Standardized out;
  out.data = ds;
  const std::size_t n = ds.n(), p = ds.p();
  out.scale.assign(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    const double norm_sq = kernels::sum_sq(ds.design.col(j), n) / static_cast<double>(n);
    if (norm_sq > 0.0) {
      const double s = 1.0 / std::sqrt(norm_sq);
      out.scale[j] = s;
      kernels::scal(s, out.data.design.col(j), n);
    }
  }
  return out;
}

}  // namespace signglm
