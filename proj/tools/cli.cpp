#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "report.hpp"
#include "signglm/bounds.hpp"
#include "signglm/conditions.hpp"
#include "signglm/estimators.hpp"
#include "signglm/simulate.hpp"

namespace signglm::cli {

namespace {

using nlohmann::json;

json cv_trace_json(const std::vector<CvPoint>& trace) {
  json arr = json::array();
  for (const auto& pt : trace)
    arr.push_back({{"lambda", pt.lambda}, {"mean_loss", pt.mean_loss}, {"se", pt.se}});
  return arr;
}

json diagnostics_json(const SolveDiagnostics& d) {
  json j;
  j["iterations"] = d.iterations;
  j["final_objective"] = d.final_objective;
  j["kkt_residual"] = d.kkt_residual;
  j["converged"] = d.converged;
  if (!d.note.empty()) j["note"] = d.note;
  if (!d.stages.empty()) {
    json stages = json::array();
    for (const auto& s : d.stages)
      stages.push_back({{"mu", s.mu}, {"iterations", s.iterations}, {"kkt", s.kkt}});
    j["smoothing_stages"] = stages;
  }
  return j;
}

json fit_result_json(const FitResult& fit, const Vec& beta_original, bool standardized) {
  json j;
  j["beta"] = beta_original;
  j["objective"] = fit.objective;
  j["diagnostics"] = diagnostics_json(fit.diagnostics);
  j["standardized"] = standardized;
  if (fit.lambda_used) j["lambda_used"] = *fit.lambda_used;
  if (!fit.cv_trace.empty()) {
    j["cv_trace"] = cv_trace_json(fit.cv_trace);
    j["cv_reshuffles"] = fit.cv.reshuffles;
    j["cv_stratified"] = fit.cv.stratified;
  }
  std::size_t support = 0;
  for (double v : beta_original)
    if (v != 0.0) ++support;
  j["support_size"] = support;
  j["l1_norm"] = lq_norm(beta_original, 1.0);
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  std::string data_path, loss = "squared", response_col, out = "fit_result.json";
  bool lasso = false, cv = false, one_se = false, no_standardize = false;
  double lambda = -1.0;
  int cv_folds = 10, cv_grid = 100;
  std::uint64_t cv_seed = 42;
  double tol = 1e-8;
  int max_iter = 50000;
  bool verbose = false;
};

int do_fit(const FitArgs& a, const std::vector<std::string>& raw_args) {
  const LossSpec spec = LossSpec::parse(a.loss);
  Dataset ds = load_csv(a.data_path, {a.response_col});

  SolveOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;

  const bool standardized = !a.no_standardize;
  const Standardized st = standardized ? standardize(ds) : Standardized{ds, Vec(ds.p(), 1.0)};

  FitResult fit;
  if (!a.lasso) {
    fit = fit_sign_constrained(st.data, spec, opts);
  } else if (a.cv) {
    fit = fit_lasso_cv(st.data, spec, a.cv_folds, a.cv_grid, a.cv_seed, opts, a.one_se);
  } else {
    if (a.lambda < 0.0)
      throw std::invalid_argument("fit: --lasso needs --lambda <value> or --cv");
    fit = fit_lasso(st.data, spec, a.lambda, opts);
  }

  const Vec beta = st.unscale(fit.beta);
  json j = fit_result_json(fit, beta, standardized);
  j["loss"] = spec.to_string();
  j["constraint"] = a.lasso ? "l1" : "nonneg";
  write_json(a.out, j);
  write_manifest(a.out, "fit", raw_args,
                 {{"input_hash", file_hash(a.data_path)}, {"cv_seed", a.cv_seed}});

  std::cout << "fit: support " << j["support_size"] << "/" << beta.size() << ", l1 norm "
            << format_double(j["l1_norm"].get<double>()) << ", kkt residual "
            << format_double(fit.diagnostics.kkt_residual)
            << (fit.diagnostics.converged ? "" : "  [NOT CONVERGED]") << "\n"
            << "wrote " << a.out << "\n";
  if (a.verbose) std::cout << j.dump(2) << "\n";
  return fit.diagnostics.converged ? kExitOk : kExitNonConvergence;
}

// ---- conditions ---------------------------------------------------------------

struct ConditionsArgs {
  std::string data_path, support_str, l_str = "auto", loss;
  std::vector<double> toeplitz;  // p, rho
  std::string out = "conditions.json";
  bool estimate = false, standardize_flag = false;
  std::size_t re_cap = 0, re_samples = 20000;
  double k0 = -1.0, kx = -1.0, density_lower = -1.0, tol = 1e-10;
  std::uint64_t seed = 20240;
};

int do_conditions(const ConditionsArgs& a, const std::vector<std::string>& raw_args) {
  GramMatrix gram;
  std::optional<Dataset> ds;
  if (!a.toeplitz.empty()) {
    if (a.toeplitz.size() != 2)
      throw std::invalid_argument("conditions: --toeplitz needs exactly p and rho");
    gram = toeplitz_sigma(static_cast<std::size_t>(a.toeplitz[0]), a.toeplitz[1]);
  } else if (!a.data_path.empty()) {
    ds = load_csv(a.data_path, {});
    if (a.standardize_flag) *ds = standardize(*ds).data;
    gram = GramMatrix::from_dataset(*ds);
  } else {
    throw std::invalid_argument("conditions: need --data <csv> or --toeplitz <p> <rho>");
  }

  SolveOptions opts;
  opts.tol = a.tol;
  opts.max_iter = 200000;

  ConditionReport report;
  const auto tau = positive_eigenvalue_constant(gram, opts, a.seed);
  report.tau_sq = tau.tau_sq;
  report.tau_certificate = tau.certificate;

  report.c_column = 0.0;
  if (ds) {
    report.c_column = column_norm_constant(*ds);
  } else {
    for (std::size_t j = 0; j < gram.p(); ++j)
      report.c_column = std::max(report.c_column, gram.sigma(j, j));
  }

  if (!a.support_str.empty()) {
    const SupportSet support = SupportSet::parse(a.support_str);
    support.check_range(gram.p());
    if (static_cast<int>(support.size()) > kCompatibilityExactGuard && !a.estimate) {
      std::cerr << "conditions: |S| = " << support.size() << " exceeds the exact-mode guard of "
                << kCompatibilityExactGuard << " (2^|S| sign-pattern QPs); rerun with --estimate "
                << "for a non-certified upper estimate\n";
      return kExitGuard;
    }
    const double l = a.l_str == "auto" ? 3.0 * report.c_column / report.tau_sq
                                       : std::stod(a.l_str);
    const auto compat = compatibility_constant(gram, support, l, opts,
                                               kCompatibilityExactGuard, a.seed);
    report.phi_sq_compat = compat.phi_sq;
    report.phi_certified = compat.certified;
    report.l_used = l;
    report.support = support.indices;

    const std::size_t cap = a.re_cap > 0 ? a.re_cap
                                         : std::min(gram.p(), 2 * support.size());
    const auto re = restricted_eigenvalue_bracket(gram, support, l, cap, a.re_samples, a.seed);
    report.re_lower = re.lower;
    report.re_upper = re.upper;
  }

  if (!a.loss.empty()) {
    const LossSpec spec = LossSpec::parse(a.loss);
    MarginInputs margin_in;
    if (ds)
      margin_in.k_x = a.kx >= 0.0 ? a.kx : max_abs_design_entry(*ds);
    else if (a.kx >= 0.0)
      margin_in.k_x = a.kx;
    else
      throw std::invalid_argument("conditions: analytic mode needs --kx to compute the margin");
    if (a.k0 < 0.0)
      throw std::invalid_argument(
          "conditions: the margin needs --k0 (max_i |f0(x_i)| is not identifiable from data)");
    margin_in.k_0 = a.k0;
    if (a.density_lower > 0.0) margin_in.density_lower = a.density_lower;
    report.k_x = margin_in.k_x;
    report.k_0 = margin_in.k_0;
    report.margin_c = margin_constant(spec, margin_in);
  }

  report.check_invariants();

  json j;
  j["tau_sq"] = report.tau_sq;
  j["tau_certificate"] = report.tau_certificate;
  j["tau_kkt_residual"] = tau.kkt_residual;
  j["C"] = report.c_column;
  if (report.phi_sq_compat) {
    j["phi_sq_compat"] = *report.phi_sq_compat;
    j["phi_certified"] = report.phi_certified;
    j["L_used"] = report.l_used;
    j["support"] = *report.support;
    j["re_lower"] = *report.re_lower;
    j["re_upper"] = *report.re_upper;
  }
  if (report.k_x) j["K_X"] = *report.k_x;
  if (report.k_0) j["K_0"] = *report.k_0;
  if (report.margin_c) j["margin_c"] = *report.margin_c;
  write_json(a.out, j);
  write_manifest(a.out, "conditions", raw_args,
                 {{"input_hash", a.data_path.empty() ? "" : file_hash(a.data_path)},
                  {"seed", a.seed}});

  std::cout << "tau_sq = " << format_double(report.tau_sq) << ", C = "
            << format_double(report.c_column);
  if (report.phi_sq_compat)
    std::cout << ", phi_sq(L=" << format_double(report.l_used)
              << ") = " << format_double(*report.phi_sq_compat)
              << (report.phi_certified ? "" : " [estimate]");
  std::cout << "\nwrote " << a.out << "\n";
  return kExitOk;
}

// ---- bound --------------------------------------------------------------------

struct BoundArgs {
  std::string conditions_path, loss, q_list_str, out = "bound.json";
  double margin_c = -1.0, phi_sq = -1.0, tau_sq = -1.0, c_column = -1.0;
  double s_star = -1.0, lambda = -1.0, excess = 0.0, c_l = -1.0, t = -1.0;
  std::size_t p = 0, n = 0;
};

int do_bound(const BoundArgs& a0, const std::vector<std::string>& raw_args) {
  BoundArgs a = a0;
  if (!a.conditions_path.empty()) {
    std::ifstream in(a.conditions_path);
    if (!in) throw std::invalid_argument("bound: cannot open " + a.conditions_path);
    json j = json::parse(in);
    if (a.margin_c < 0.0 && j.contains("margin_c")) a.margin_c = j["margin_c"].get<double>();
    if (a.phi_sq < 0.0 && j.contains("phi_sq_compat")) a.phi_sq = j["phi_sq_compat"].get<double>();
    if (a.tau_sq < 0.0) a.tau_sq = j["tau_sq"].get<double>();
    if (a.c_column < 0.0) a.c_column = j["C"].get<double>();
  }
  if (a.s_star < 0.0) throw std::invalid_argument("bound: --s-star is required");

  double lambda = a.lambda;
  std::optional<double> t_used;
  if (lambda < 0.0) {
    double c_l = a.c_l;
    if (c_l < 0.0) {
      if (a.loss.empty())
        throw std::invalid_argument("bound: need --lambda, or --c-L/--loss with --p --n --t");
      const LossSpec spec = LossSpec::parse(a.loss);
      if (!spec.has_global_lipschitz())
        throw std::invalid_argument(
            "bound: the lambda rate needs the Lipschitz constant c_L, and the squared loss has "
            "no global c_L; use logistic or check, or pass --lambda directly");
      c_l = spec.lipschitz();
    }
    if (a.p == 0 || a.n == 0 || a.t <= 0.0)
      throw std::invalid_argument("bound: the rate formula needs --p, --n and --t > 0");
    lambda = lambda_rate(c_l, a.c_column, a.p, a.n, a.t);
    t_used = a.t;
  }

  std::vector<double> q_list;
  if (!a.q_list_str.empty()) {
    std::stringstream ss(a.q_list_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) q_list.push_back(std::stod(tok));
  }

  OracleBound bound =
      oracle_bounds(a.margin_c, a.phi_sq, a.tau_sq, a.c_column, a.s_star, lambda, a.excess, q_list);
  bound.t = t_used;

  json j;
  j["lambda"] = bound.lambda;
  if (bound.t) j["t"] = *bound.t;
  j["excess_at_fstar"] = bound.excess_at_fstar;
  j["eps_lambda"] = bound.eps_lambda;
  j["M_lambda"] = bound.m_lambda;
  j["prediction_bound"] = bound.prediction_bound;
  j["M_lambda_le_one"] = bound.m_lambda_le_one;
  if (!bound.lq_bounds.empty()) {
    json lq = json::object();
    for (const auto& [q, v] : bound.lq_bounds) lq[format_double(q)] = v;
    j["lq_bounds_qth_power"] = lq;
  }
  j["inputs"] = {{"margin_c", a.margin_c}, {"phi_sq", a.phi_sq},   {"tau_sq", a.tau_sq},
                 {"C", a.c_column},        {"s_star", a.s_star}};
  write_json(a.out, j);
  write_manifest(a.out, "bound", raw_args, {});

  std::cout << "eps_lambda = " << format_double(bound.eps_lambda)
            << ", M_lambda = " << format_double(bound.m_lambda)
            << ", prediction bound = " << format_double(bound.prediction_bound) << "\n"
            << "M_lambda <= 1 hypothesis: " << (bound.m_lambda_le_one ? "holds" : "FAILS")
            << "\nwrote " << a.out << "\n";
  return kExitOk;
}

// ---- simulate / report ----------------------------------------------------------

struct SimulateArgs {
  std::string config_path, out = "results.csv";
  int workers = 0;
};

int do_simulate(const SimulateArgs& a, const std::vector<std::string>& raw_args) {
  const ExperimentConfig cfg = parse_experiment_config(a.config_path);
  const double t_resolved = cfg.t_param > 0.0 ? cfg.t_param
                                              : std::log(static_cast<double>(cfg.n));
  const ExperimentResult result = run_experiment(cfg, a.out, a.workers);
  write_manifest(a.out, "simulate", raw_args,
                 {{"config_hash", file_hash(a.config_path)},
                  {"seed", cfg.seed},
                  {"t_resolved", t_resolved},
                  {"records", result.records.size()}});
  std::cout << render_text_table(aggregate(result.records));
  std::cout << "wrote " << a.out << " (" << result.records.size() << " records)\n";
  return kExitOk;
}

struct ReportArgs {
  std::string results_path, out_prefix = "report";
};

int do_report(const ReportArgs& a, const std::vector<std::string>& raw_args) {
  const auto records = read_records_csv(a.results_path);  // SchemaError -> exit 4
  const auto aggregates = aggregate(records);
  const std::string table = render_text_table(aggregates);
  const std::string svg = render_svg(aggregates);
  {
    std::ofstream out(a.out_prefix + ".txt");
    out << table;
  }
  {
    std::ofstream out(a.out_prefix + ".svg");
    out << svg;
  }
  write_manifest(a.out_prefix + ".svg", "report", raw_args,
                 {{"input_hash", file_hash(a.results_path)}});
  std::cout << table;
  std::cout << "wrote " << a.out_prefix << ".txt and " << a.out_prefix << ".svg\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"sign-constrained empirical-loss minimization toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit a sign-constrained or Lasso model from a CSV");
  fit->add_option("data", fit_args.data_path, "input CSV")->required();
  fit->add_option("--loss", fit_args.loss, "squared | logistic | check:<gamma>")->required();
  fit->add_flag("--lasso", fit_args.lasso, "l1-penalized instead of sign-constrained");
  fit->add_option("--lambda", fit_args.lambda, "Lasso penalty level");
  fit->add_flag("--cv", fit_args.cv, "cross-validate lambda");
  fit->add_flag("--one-se", fit_args.one_se, "1-SE selection rule instead of the minimum");
  fit->add_option("--cv-folds", fit_args.cv_folds, "CV folds (default 10)");
  fit->add_option("--cv-grid", fit_args.cv_grid, "lambda grid size (default 100)");
  fit->add_option("--cv-seed", fit_args.cv_seed, "fold-shuffle seed");
  fit->add_option("--response-col", fit_args.response_col,
                  "response column name (default: last column)");
  fit->add_flag("--no-standardize", fit_args.no_standardize,
                "fit on raw columns (default rescales to unit column norm)");
  fit->add_option("--tol", fit_args.tol, "KKT residual target (default 1e-8)");
  fit->add_option("--max-iter", fit_args.max_iter, "iteration cap (default 50000)");
  fit->add_option("--out", fit_args.out, "output JSON path");
  fit->add_flag("--verbose", fit_args.verbose, "print the full result JSON");

  ConditionsArgs cond_args;
  auto* cond = app.add_subcommand("conditions", "design-matrix constants (tau^2, phi^2, RE, C)");
  cond->add_option("--data", cond_args.data_path, "CSV whose Gram matrix to analyze");
  cond->add_option("--toeplitz", cond_args.toeplitz, "analytic Toeplitz Sigma: p rho")
      ->expected(2);
  cond->add_option("--support", cond_args.support_str, "support indices, e.g. 0,1,2");
  cond->add_option("--L", cond_args.l_str, "l1 budget off the support, or 'auto' = 3C/tau^2");
  cond->add_flag("--estimate", cond_args.estimate,
                 "allow non-certified estimates past the exact-mode guard");
  cond->add_flag("--standardize", cond_args.standardize_flag, "rescale columns first");
  cond->add_option("--re-cap", cond_args.re_cap, "N for the RE bracket (default 2|S|)");
  cond->add_option("--re-samples", cond_args.re_samples, "cone samples for the RE upper bound");
  cond->add_option("--loss", cond_args.loss, "loss for the margin constant");
  cond->add_option("--k0", cond_args.k0, "K_0 = max_i |f0(x_i)| (user-supplied)");
  cond->add_option("--kx", cond_args.kx, "K_X override (required in analytic mode)");
  cond->add_option("--density-lower", cond_args.density_lower,
                   "response-density lower bound (check loss margin)");
  cond->add_option("--tol", cond_args.tol, "QP certificate tolerance");
  cond->add_option("--seed", cond_args.seed, "multistart seed");
  cond->add_option("--out", cond_args.out, "output JSON path");

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "oracle-bound formulas (eps_lambda, M_lambda, l_q)");
  bound->add_option("--conditions", bound_args.conditions_path,
                    "conditions JSON to pull constants from");
  bound->add_option("--margin-c", bound_args.margin_c, "margin constant c");
  bound->add_option("--phi-sq", bound_args.phi_sq, "compatibility constant phi^2");
  bound->add_option("--tau-sq", bound_args.tau_sq, "positive-eigenvalue constant tau^2");
  bound->add_option("--C", bound_args.c_column, "C = max_j ||psi_j||^2");
  bound->add_option("--s-star", bound_args.s_star, "sparsity s*")->required();
  bound->add_option("--lambda", bound_args.lambda, "lambda (skips the rate formula)");
  bound->add_option("--c-L", bound_args.c_l, "Lipschitz constant for the rate formula");
  bound->add_option("--loss", bound_args.loss, "loss whose c_L to use for the rate");
  bound->add_option("--p", bound_args.p, "dimension for the rate formula");
  bound->add_option("--n", bound_args.n, "sample size for the rate formula");
  bound->add_option("--t", bound_args.t, "tail parameter t (probability 1 - e^-t)");
  bound->add_option("--excess", bound_args.excess, "excess risk at f* (default 0)");
  bound->add_option("--q-list", bound_args.q_list_str, "l_q bounds to emit, e.g. 1,1.5,2");
  bound->add_option("--out", bound_args.out, "output JSON path");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "run the Toeplitz simulation sweep");
  sim->add_option("config", sim_args.config_path, "experiment config (JSON or key=value)")
      ->required();
  sim->add_option("--out", sim_args.out, "results CSV (appended; resumable by cell)");
  sim->add_option("--workers", sim_args.workers,
                  "worker threads (default: SIGNGLM_WORKERS or hardware)");

  ReportArgs rep_args;
  auto* rep = app.add_subcommand("report", "aggregate a results CSV into a table and SVG");
  rep->add_option("results", rep_args.results_path, "results CSV")->required();
  rep->add_option("--out-prefix", rep_args.out_prefix, "output prefix (default 'report')");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit->parsed()) return do_fit(fit_args, args);
    if (cond->parsed()) return do_conditions(cond_args, args);
    if (bound->parsed()) return do_bound(bound_args, args);
    if (sim->parsed()) return do_simulate(sim_args, args);
    if (rep->parsed()) return do_report(rep_args, args);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

int run_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace signglm::cli
