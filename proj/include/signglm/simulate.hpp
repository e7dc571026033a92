#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "signglm/conditions.hpp"
#include "signglm/estimators.hpp"

// The Toeplitz-design simulation study: paired sign-constrained vs
// cross-validated-Lasso fits on identical data, log l1-error ratios
// aggregated per (rho, p, s) cell. Fully seeded and resumable by cell.

namespace signglm {

enum class ModelKind { logistic, lad };

ModelKind parse_model(const std::string& s);
std::string model_name(ModelKind m);

// Sigma_{kk'} = rho^{|k-k'|/p}; unit diagonal, entries decay with |k-k'|.
GramMatrix toeplitz_sigma(std::size_t p, double rho);

// n iid rows from N_p(0, Sigma) via the Cholesky factor. Generation order is
// pinned (row by row, standard normals then the triangular transform in plain
// scalar arithmetic), so a fixed seed reproduces the matrix bit for bit.
// jitter adds 1e-10 I before factorizing; without it a failed factorization
// throws with a hint to enable it.
Matrix sample_gaussian(const GramMatrix& gram, std::size_t n, std::uint64_t seed,
                       bool jitter = false);

// Exactly s entries equal to 1 at seeded positions drawn without replacement.
Vec sparse_beta(std::size_t p, std::size_t s, std::uint64_t seed);

// logistic: y_i ~ Bernoulli(G(x_i' beta)); lad: y_i = x_i' beta + eps_i with
// standard Laplace eps via inverse CDF.
Vec gen_responses(ModelKind model, const Matrix& design, const Vec& true_beta,
                  std::uint64_t seed);

struct ExperimentConfig {
  ModelKind model = ModelKind::logistic;
  std::vector<double> rho_grid;
  std::vector<std::size_t> p_grid;
  std::vector<std::size_t> s_grid;
  std::size_t n = 100;
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  int cv_folds = 10;
  int cv_grid_size = 100;
  bool standardize = true;
  double t_param = 0.0;  // 0 = default log(n), recorded at run time

  void validate() const;
  std::size_t cell_count() const { return rho_grid.size() * p_grid.size() * s_grid.size(); }
};

struct Cell {
  double rho;
  std::size_t p, s;
};

Cell cell_at(const ExperimentConfig& cfg, std::size_t cell_index);

struct RepRecord {
  std::string model;
  double rho = 0.0;
  std::size_t p = 0, s = 0, n = 0, rep = 0;
  std::uint64_t seed = 0;  // derived design seed, for traceability
  double l1_err_sign = 0.0;
  double l1_err_lasso = 0.0;
  double log_ratio = 0.0;  // nan for non-ok rows
  std::string status;      // ok | sign_exact | lasso_exact | both_exact | solver_failure
  int n_redraws = 0;       // degenerate logistic samples regenerated
  int sign_converged = 0;
  int lasso_converged = 0;
  std::string data_hash;   // fnv1a-64 over the design+response bytes
  double runtime_ms = 0.0;
};

struct CellAggregate {
  std::string model;
  double rho = 0.0;
  std::size_t p = 0, s = 0;
  double mean_log_ratio = 0.0;
  double se = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_excluded = 0;
};

struct ExperimentResult {
  std::vector<RepRecord> records;  // ordered by (cell, rep)
};

// mean +- se of log_ratio over status == "ok" rows, grouped per cell.
std::vector<CellAggregate> aggregate(const std::vector<RepRecord>& records);

// ---- CSV (versioned schema) ------------------------------------------------

inline constexpr const char* kCsvSchemaLine = "# signglm-sim-v1";

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_csv_header(std::ostream& os);
void append_csv_record(std::ostream& os, const RepRecord& rec);
std::vector<RepRecord> read_records_csv(const std::string& path);  // throws SchemaError

// ---- the sweep --------------------------------------------------------------

// Runs every (cell, rep); csv_path == "" keeps results in memory only,
// otherwise rows are appended cell by cell (existing rows for this config are
// detected and skipped, making an interrupted run resumable by cell). workers
// <= 0 picks SIGNGLM_WORKERS or the hardware count. Per-rep solver failures
// are recorded, never fatal.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& csv_path = "",
                                int workers = 0);

std::string fnv1a_hex(const void* data, std::size_t bytes);

// round-trip exact formatting used everywhere numbers are persisted
std::string format_double(double v);

}  // namespace signglm
