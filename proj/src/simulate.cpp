#include "signglm/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "signglm/linalg.hpp"
#include "signglm/rng.hpp"

namespace signglm {

namespace {

// seed-tree purposes; derived = mix_seed({base, cell+1, rep+1, purpose, attempt})
constexpr std::uint64_t kPurposeDesign = 1;
constexpr std::uint64_t kPurposeBeta = 2;
constexpr std::uint64_t kPurposeResponse = 3;
constexpr std::uint64_t kPurposeCv = 4;

std::uint64_t rep_seed(const ExperimentConfig& cfg, std::size_t cell, std::size_t rep,
                       std::uint64_t purpose, std::uint64_t attempt = 0) {
  return mix_seed({cfg.seed, cell + 1, rep + 1, purpose, attempt});
}

}  // namespace

ModelKind parse_model(const std::string& s) {
  if (s == "logistic") return ModelKind::logistic;
  if (s == "lad") return ModelKind::lad;
  throw std::invalid_argument("model must be 'logistic' or 'lad', got '" + s + "'");
}

std::string model_name(ModelKind m) { return m == ModelKind::logistic ? "logistic" : "lad"; }

GramMatrix toeplitz_sigma(std::size_t p, double rho) {
  if (p < 1) throw std::invalid_argument("toeplitz: need p >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("toeplitz: rho must lie in (0,1)");
  GramMatrix g;
  g.sigma = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t k2 = 0; k2 <= k; ++k2) {
      const double v = std::pow(rho, static_cast<double>(k - k2) / static_cast<double>(p));
      g.sigma(k, k2) = v;
      g.sigma(k2, k) = v;
    }
  return g;
}

Matrix sample_gaussian(const GramMatrix& gram, std::size_t n, std::uint64_t seed, bool jitter) {
  gram.validate();
  const std::size_t p = gram.p();
  Matrix base = gram.sigma;
  if (jitter)
    for (std::size_t j = 0; j < p; ++j) base(j, j) += 1e-10;
  const auto chol = linalg::cholesky_lower(base);
  if (!chol)
    throw std::runtime_error(
        "sample_gaussian: covariance is not positive definite (Cholesky failed); the jitter "
        "flag adds 1e-10*I and is recorded in outputs");

  // row-major copy of L so each output coordinate reads a contiguous prefix
  std::vector<double> lrow(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k <= i; ++k) lrow[i * p + k] = (*chol)(i, k);

  Matrix out(n, p);
  Rng rng(seed);
  Vec z(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z[j] = rng.normal();
    for (std::size_t j = 0; j < p; ++j) {
      // fixed-order scalar accumulation keeps sampling platform-reproducible
      const double* lj = lrow.data() + j * p;
      double acc = 0.0;
      for (std::size_t k = 0; k <= j; ++k) acc += lj[k] * z[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Vec sparse_beta(std::size_t p, std::size_t s, std::uint64_t seed) {
  if (s < 1 || s > p) throw std::invalid_argument("sparse_beta: need 1 <= s <= p");
  Rng rng(seed);
  const auto idx = rng.sample_without_replacement(p, s);
  Vec beta(p, 0.0);
  for (std::size_t j : idx) beta[j] = 1.0;
  return beta;
}

Vec gen_responses(ModelKind model, const Matrix& design, const Vec& true_beta,
                  std::uint64_t seed) {
  Vec a;
  matvec(design, true_beta, a);
  Rng rng(seed);
  Vec y(design.n_rows);
  if (model == ModelKind::logistic) {
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = rng.uniform01() < sigmoid(a[i]) ? 1.0 : 0.0;
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] + rng.laplace();
  }
  return y;
}

void ExperimentConfig::validate() const {
  if (rho_grid.empty() || p_grid.empty() || s_grid.empty())
    throw std::invalid_argument("config: rho/p/s grids must be nonempty");
  for (double rho : rho_grid)
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("config: rho must lie in (0,1)");
  for (std::size_t s : s_grid)
    for (std::size_t p : p_grid)
      if (s > p) throw std::invalid_argument("config: s > p in the grid");
  if (n < 1 || reps < 1) throw std::invalid_argument("config: need n >= 1 and reps >= 1");
  if (cv_folds < 2) throw std::invalid_argument("config: need cv_folds >= 2");
  if (n < static_cast<std::size_t>(cv_folds))
    throw std::invalid_argument("config: need n >= cv_folds");
  if (cv_grid_size < 1) throw std::invalid_argument("config: need cv_grid_size >= 1");
  if (t_param < 0.0) throw std::invalid_argument("config: t must be >= 0 (0 = default log n)");
}

Cell cell_at(const ExperimentConfig& cfg, std::size_t cell_index) {
  const std::size_t per_rho = cfg.p_grid.size() * cfg.s_grid.size();
  const std::size_t r = cell_index / per_rho;
  const std::size_t rem = cell_index % per_rho;
  return {cfg.rho_grid[r], cfg.p_grid[rem / cfg.s_grid.size()],
          cfg.s_grid[rem % cfg.s_grid.size()]};
}

std::string fnv1a_hex(const void* data, std::size_t bytes) {
  const auto* b = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<CellAggregate> aggregate(const std::vector<RepRecord>& records) {
  std::map<std::tuple<std::string, double, std::size_t, std::size_t>,
           std::pair<std::vector<double>, std::size_t>>
      cells;
  for (const auto& r : records) {
    auto& slot = cells[{r.model, r.rho, r.p, r.s}];
    if (r.status == "ok")
      slot.first.push_back(r.log_ratio);
    else
      ++slot.second;
  }
  std::vector<CellAggregate> out;
  for (const auto& [key, slot] : cells) {
    CellAggregate agg;
    agg.model = std::get<0>(key);
    agg.rho = std::get<1>(key);
    agg.p = std::get<2>(key);
    agg.s = std::get<3>(key);
    agg.n_ok = slot.first.size();
    agg.n_excluded = slot.second;
    if (!slot.first.empty()) {
      double mean = 0.0;
      for (double v : slot.first) mean += v;
      mean /= static_cast<double>(slot.first.size());
      double var = 0.0;
      for (double v : slot.first) var += (v - mean) * (v - mean);
      agg.mean_log_ratio = mean;
      agg.se = slot.first.size() > 1
                   ? std::sqrt(var / static_cast<double>(slot.first.size() - 1)) /
                         std::sqrt(static_cast<double>(slot.first.size()))
                   : 0.0;
    }
    out.push_back(std::move(agg));
  }
  return out;
}

namespace {

constexpr const char* kCsvColumns =
    "model,rho,p,s,n,rep,seed,l1_err_sign,l1_err_lasso,log_ratio,status,n_redraws,"
    "sign_converged,lasso_converged,data_hash,runtime_ms";

}  // namespace

void write_csv_header(std::ostream& os) {
  os << kCsvSchemaLine << "\n" << kCsvColumns << "\n";
}

void append_csv_record(std::ostream& os, const RepRecord& r) {
  os << r.model << ',' << format_double(r.rho) << ',' << r.p << ',' << r.s << ',' << r.n << ','
     << r.rep << ',' << r.seed << ',' << format_double(r.l1_err_sign) << ','
     << format_double(r.l1_err_lasso) << ',' << format_double(r.log_ratio) << ',' << r.status
     << ',' << r.n_redraws << ',' << r.sign_converged << ',' << r.lasso_converged << ','
     << r.data_hash << ',' << format_double(r.runtime_ms) << '\n';
}

std::vector<RepRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCsvSchemaLine, 0) != 0)
    throw SchemaError("results file '" + path + "' does not start with '" + kCsvSchemaLine +
                      "'");
  std::vector<RepRecord> out;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!saw_columns) {
      if (line != kCsvColumns)
        throw SchemaError("results file column row does not match schema signglm-sim-v1");
      saw_columns = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cells.push_back(tok);
    if (cells.size() != 16) throw SchemaError("bad record width in " + path);
    RepRecord r;
    r.model = cells[0];
    r.rho = std::stod(cells[1]);
    r.p = std::stoul(cells[2]);
    r.s = std::stoul(cells[3]);
    r.n = std::stoul(cells[4]);
    r.rep = std::stoul(cells[5]);
    r.seed = std::stoull(cells[6]);
    r.l1_err_sign = std::stod(cells[7]);
    r.l1_err_lasso = std::stod(cells[8]);
    r.log_ratio = std::stod(cells[9]);
    r.status = cells[10];
    r.n_redraws = std::stoi(cells[11]);
    r.sign_converged = std::stoi(cells[12]);
    r.lasso_converged = std::stoi(cells[13]);
    r.data_hash = cells[14];
    r.runtime_ms = std::stod(cells[15]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

RepRecord run_single_rep(const ExperimentConfig& cfg, std::size_t cell_index, std::size_t rep) {
  const auto t0 = std::chrono::steady_clock::now();
  const Cell cell = cell_at(cfg, cell_index);

  RepRecord rec;
  rec.model = model_name(cfg.model);
  rec.rho = cell.rho;
  rec.p = cell.p;
  rec.s = cell.s;
  rec.n = cfg.n;
  rec.rep = rep;
  rec.seed = rep_seed(cfg, cell_index, rep, kPurposeDesign);
  rec.log_ratio = std::numeric_limits<double>::quiet_NaN();

  try {
    const GramMatrix sigma = toeplitz_sigma(cell.p, cell.rho);
    const Matrix design = sample_gaussian(sigma, cfg.n, rec.seed);
    const Vec true_beta = sparse_beta(cell.p, cell.s, rep_seed(cfg, cell_index, rep, kPurposeBeta));

    Vec response;
    int redraws = 0;
    for (; redraws < 100; ++redraws) {
      response = gen_responses(cfg.model, design, true_beta,
                               rep_seed(cfg, cell_index, rep, kPurposeResponse,
                                        static_cast<std::uint64_t>(redraws)));
      if (cfg.model != ModelKind::logistic) break;
      bool has0 = false, has1 = false;
      for (double y : response) (y == 1.0 ? has1 : has0) = true;
      if (has0 && has1) break;  // degenerate all-0/all-1 samples are redrawn
    }
    rec.n_redraws = redraws;
    if (redraws == 100) {
      rec.status = "solver_failure";
      return rec;
    }

    Dataset ds{design, response, {}};
    rec.data_hash = [&] {
      std::string bytes(reinterpret_cast<const char*>(design.data.data()),
                        design.data.size() * sizeof(double));
      bytes.append(reinterpret_cast<const char*>(response.data()),
                   response.size() * sizeof(double));
      return fnv1a_hex(bytes.data(), bytes.size());
    }();

    const LossSpec loss =
        cfg.model == ModelKind::logistic ? LossSpec::parse("logistic") : LossSpec::parse("check:0.5");

    SolveOptions opts;
    opts.max_iter = 20000;

    const Standardized st = cfg.standardize ? standardize(ds) : Standardized{ds, Vec(ds.p(), 1.0)};

    FitResult sign_fit = fit_sign_constrained(st.data, loss, opts);
    FitResult lasso_fit = fit_lasso_cv(st.data, loss, cfg.cv_folds, cfg.cv_grid_size,
                                       rep_seed(cfg, cell_index, rep, kPurposeCv), opts);
    rec.sign_converged = sign_fit.diagnostics.converged ? 1 : 0;
    rec.lasso_converged = lasso_fit.diagnostics.converged ? 1 : 0;

    const Vec beta_sign = st.unscale(sign_fit.beta);
    const Vec beta_lasso = st.unscale(lasso_fit.beta);
    rec.l1_err_sign = lq_norm(beta_sign - true_beta, 1.0);
    rec.l1_err_lasso = lq_norm(beta_lasso - true_beta, 1.0);

    const bool sign_zero = rec.l1_err_sign == 0.0;
    const bool lasso_zero = rec.l1_err_lasso == 0.0;
    if (sign_zero && lasso_zero)
      rec.status = "both_exact";
    else if (sign_zero)
      rec.status = "sign_exact";
    else if (lasso_zero)
      rec.status = "lasso_exact";
    else {
      rec.status = "ok";
      rec.log_ratio = std::log(rec.l1_err_sign / rec.l1_err_lasso);
    }
  } catch (const std::exception&) {
    rec.status = "solver_failure";
  }

  rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                       .count();
  return rec;
}

int worker_count(int requested, std::size_t reps) {
  int w = requested;
  if (w <= 0) {
    if (const char* env = std::getenv("SIGNGLM_WORKERS")) w = std::atoi(env);
  }
  if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
  if (w <= 0) w = 1;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w), reps));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& csv_path,
                                int workers) {
  cfg.validate();

  // derived-seed injectivity: every (cell, rep, purpose) must map to a
  // distinct seed within the run
  {
    std::set<std::uint64_t> seen;
    for (std::size_t c = 0; c < cfg.cell_count(); ++c)
      for (std::size_t r = 0; r < cfg.reps; ++r)
        for (std::uint64_t purpose : {kPurposeDesign, kPurposeBeta, kPurposeResponse, kPurposeCv})
          if (!seen.insert(rep_seed(cfg, c, r, purpose)).second)
            throw std::logic_error("seed derivation collision; change the base seed");
  }

  // resume: collect (cell, rep) pairs already present for this config
  std::set<std::pair<std::size_t, std::size_t>> done;
  std::vector<RepRecord> loaded;
  bool file_exists = false;
  if (!csv_path.empty()) {
    std::ifstream probe(csv_path);
    file_exists = probe.good();
    if (file_exists) {
      for (auto& r : read_records_csv(csv_path)) {
        for (std::size_t c = 0; c < cfg.cell_count(); ++c) {
          const Cell cell = cell_at(cfg, c);
          if (r.model == model_name(cfg.model) && r.rho == cell.rho && r.p == cell.p &&
              r.s == cell.s && r.n == cfg.n && r.rep < cfg.reps) {
            done.insert({c, r.rep});
            loaded.push_back(r);
            break;
          }
        }
      }
    }
  }

  std::ofstream out;
  if (!csv_path.empty()) {
    out.open(csv_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open results file for append: " + csv_path);
    if (!file_exists) {
      write_csv_header(out);
      out.flush();
    }
  }

  ExperimentResult result;
  result.records = std::move(loaded);

  const int n_workers = worker_count(workers, cfg.reps);
  for (std::size_t c = 0; c < cfg.cell_count(); ++c) {
    std::vector<std::size_t> todo;
    for (std::size_t r = 0; r < cfg.reps; ++r)
      if (!done.count({c, r})) todo.push_back(r);
    if (todo.empty()) continue;

    std::vector<RepRecord> slots(todo.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) return;
        slots[k] = run_single_rep(cfg, c, todo[k]);
      }
    };
    if (n_workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }

    // flush completed cell in rep order; scheduling cannot affect the output
    for (auto& r : slots) {
      if (out.is_open()) append_csv_record(out, r);
      result.records.push_back(std::move(r));
    }
    if (out.is_open()) out.flush();
  }

  std::sort(result.records.begin(), result.records.end(),
            [&](const RepRecord& a, const RepRecord& b) {
              return std::tie(a.rho, a.p, a.s, a.rep) < std::tie(b.rho, b.p, b.s, b.rep);
            });
  return result;
}

}  // namespace signglm
