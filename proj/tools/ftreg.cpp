// ftreg: functional tensor regression CLI.
//
// Subcommands: simulate, fit, tune, evaluate, experiment. All randomness
// flows from --seed (or the config seed); when no seed is given a fresh one
// is drawn and printed so runs can be reproduced.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "ftreg/parallel.hpp"
#include "ftreg/run_config.hpp"
#include "ftreg/selection.hpp"
#include "ftreg/simulate.hpp"
#include "ftreg/solver.hpp"
#include "ftreg/tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool json_errors = false;
};

std::uint64_t resolve_seed(const GlobalOptions& global, const ftreg::RunConfig* config) {
  if (global.seed) return *global.seed;
  if (config && config->seed_given) return config->sim.seed;
  std::random_device rd;
  const std::uint64_t fresh =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  std::cout << "seed: " << fresh << "\n";
  return fresh;
}

struct Dataset {
  ftreg::RegressionData data;
  std::optional<ftreg::DenseTensor> truth;
};

Dataset load_dataset(const fs::path& dir) {
  const ftreg::DenseTensor raw = ftreg::read_tensor_file(dir / "X.ftrt");
  const Eigen::VectorXd y = ftreg::read_vector_csv(dir / "y.csv");
  const ftreg::Grid grid = ftreg::read_grid_csv(dir / "grid.csv");
  Dataset out{ftreg::RegressionData::from_raw(raw, y, grid), std::nullopt};
  const fs::path truth_path = dir / "theta_true.ftrt";
  if (fs::exists(truth_path)) out.truth = ftreg::read_tensor_file(truth_path);
  return out;
}

std::string bool_field(bool v) { return v ? "1" : "0"; }

void write_experiment_tables(const fs::path& out_dir, const ftreg::ExperimentTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::string>> errors;
  for (const auto& row : table.rows) {
    if (!row.error.empty()) {
      errors.push_back({row.sweep_value, std::to_string(row.replication), row.error});
      continue;
    }
    rows.push_back({row.sweep_value, std::to_string(row.replication),
                    ftreg::format_double(row.gcv), ftreg::format_double(row.rise),
                    std::to_string(row.iterations), bool_field(row.converged)});
  }
  ftreg::write_csv(out_dir / (table.name + ".csv"),
                   {"sweep_var", "replication", "gcv", "rise", "iterations", "converged"},
                   rows);
  std::vector<std::vector<std::string>> summary;
  for (const auto& s : table.summary) {
    summary.push_back({s.sweep_value, std::to_string(s.replications),
                       ftreg::format_double(s.gcv_mean), ftreg::format_double(s.gcv_std),
                       ftreg::format_double(s.rise_mean), ftreg::format_double(s.rise_std)});
  }
  ftreg::write_csv(
      out_dir / (table.name + "_summary.csv"),
      {"sweep_var", "replications", "gcv_mean", "gcv_std", "rise_mean", "rise_std"},
      summary);
  if (!errors.empty()) {
    ftreg::write_csv(out_dir / (table.name + "_errors.csv"),
                     {"sweep_var", "replication", "error"}, errors);
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  ftreg::atomic_write(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

json fit_diagnostics(const ftreg::FitResult& result) {
  json doc;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["lambda_min"] = result.spectral_gap;
  doc["objective_trace"] = result.objective_trace;
  doc["step_trace"] = result.step_trace;
  doc["safeguard_events"] = result.safeguard_events;
  doc["jitter_used"] = result.jitter_used;
  if (!result.error_trace.empty()) doc["error_trace"] = result.error_trace;
  return doc;
}

int cmd_simulate(const GlobalOptions& global, const std::string& config_path,
                 const fs::path& out_dir) {
  ftreg::RunConfig config = ftreg::RunConfig::from_file(config_path);
  config.sim.seed = resolve_seed(global, &config);

  const ftreg::SimTruth truth = ftreg::gen_truth(config.sim);
  const ftreg::SimDataset dataset = ftreg::gen_dataset(config.sim, truth);

  ftreg::write_tensor_file(out_dir / "X.ftrt", dataset.raw_x);
  ftreg::write_vector_csv(out_dir / "y.csv", "y", dataset.y);
  ftreg::write_grid_csv(out_dir / "grid.csv", dataset.data.grid());
  ftreg::write_tensor_file(out_dir / "theta_true.ftrt", truth.theta);

  json manifest;
  manifest["seed"] = config.sim.seed;
  manifest["n"] = config.sim.n;
  manifest["dims"] = config.sim.dims;
  manifest["rank"] = config.sim.rank;
  manifest["sigma_x"] = config.sim.sigma_x;
  manifest["sigma_y"] = config.sim.sigma_y;
  manifest["kl_terms"] = config.sim.kl_terms;
  manifest["response"] =
      config.sim.response == ftreg::SimConfig::Response::integral ? "integral"
                                                                  : "discretized";
  manifest["files"] = {"X.ftrt", "y.csv", "grid.csv", "theta_true.ftrt"};
  write_json_file(out_dir / "manifest.json", manifest);
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_fit(const GlobalOptions& global, const fs::path& data_dir, const fs::path& out_dir,
            const std::string& rank_spec, double rho, int max_iter, double rel_tol,
            const std::string& covariates_path, bool no_intercept) {
  (void)global;
  Dataset dataset = load_dataset(data_dir);
  ftreg::SplineSystem splines(dataset.data.grid());

  ftreg::FitConfig config;
  config.rank = ftreg::parse_rank_spec(rank_spec);
  config.rho = rho;
  config.max_iter = max_iter;
  config.rel_tol = rel_tol;

  json doc;
  ftreg::FitResult result;
  if (!covariates_path.empty()) {
    std::vector<std::string> header;
    const Eigen::MatrixXd covariates =
        ftreg::read_matrix_csv(covariates_path, &header);
    if (!no_intercept) {
      if (covariates.cols() == 0 ||
          (covariates.col(0).array() != 1.0).any()) {
        throw std::invalid_argument(
            "scalar covariates: first column must be an all-ones intercept "
            "(or pass --no-intercept)");
      }
    }
    ftreg::ProfiledFitResult profiled =
        ftreg::profiled_fit(dataset.data, covariates, splines, config);
    result = std::move(profiled.fit);
    doc["gamma"] = std::vector<double>(profiled.gamma.data(),
                                       profiled.gamma.data() + profiled.gamma.size());
    doc["outer_iterations"] = profiled.outer_iterations;
    doc["joint_objective_trace"] = profiled.joint_objective_trace;
  } else {
    result = ftreg::fit(dataset.data, splines, config);
  }

  ftreg::write_tensor_file(out_dir / "theta_hat.ftrt", result.theta_dense);
  doc.update(fit_diagnostics(result));
  doc["rank"] = config.rank;
  doc["rho"] = config.rho;
  write_json_file(out_dir / "fit.json", doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_tune(const GlobalOptions& global, const fs::path& data_dir, const fs::path& out_dir,
             const std::string& ranks_spec, const std::string& rho_grid_spec, int max_iter,
             double rel_tol) {
  (void)global;
  Dataset dataset = load_dataset(data_dir);
  ftreg::SplineSystem splines(dataset.data.grid());

  ftreg::SelectionOptions options;
  options.base.max_iter = max_iter;
  options.base.rel_tol = rel_tol;
  if (dataset.truth) options.truth = &*dataset.truth;

  const auto ranks = ftreg::parse_rank_grid_spec(ranks_spec);
  const auto rho_grid = ftreg::parse_rho_grid_spec(rho_grid_spec);
  const ftreg::SelectionReport report =
      ftreg::select_rank(dataset.data, splines, ranks, rho_grid, options);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const auto& c = report.candidates[i];
    std::string rank_text;
    for (std::size_t d = 0; d < c.rank.size(); ++d) {
      if (d) rank_text += ',';
      rank_text += std::to_string(c.rank[d]);
    }
    rows.push_back({rank_text, ftreg::format_double(c.rho), ftreg::format_double(c.gcv),
                    ftreg::format_double(c.rise), std::to_string(c.iterations),
                    bool_field(c.converged), bool_field(i == report.chosen)});
  }
  ftreg::write_csv(out_dir / "selection.csv",
                   {"rank", "rho", "gcv", "rise", "iterations", "converged", "chosen"},
                   rows);
  ftreg::write_tensor_file(out_dir / "theta_hat.ftrt", report.best_fit.theta_dense);

  const auto& chosen = report.candidates[report.chosen];
  json doc;
  doc["chosen_rank"] = chosen.rank;
  doc["chosen_rho"] = chosen.rho;
  doc["chosen_gcv"] = chosen.gcv;
  if (dataset.truth) doc["chosen_rise"] = chosen.rise;
  write_json_file(out_dir / "tune.json", doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_evaluate(const GlobalOptions& global, const std::string& theta_hat_path,
                 const std::string& theta_true_path, const std::string& data_dir,
                 const std::string& rank_spec, double rho, std::size_t folds,
                 int max_iter, double rel_tol, const fs::path& out_dir) {
  json doc;
  std::optional<Dataset> dataset;
  if (!data_dir.empty()) dataset = load_dataset(data_dir);

  if (!theta_hat_path.empty()) {
    if (theta_true_path.empty()) {
      throw std::invalid_argument("evaluate: --theta-true is required with --theta-hat");
    }
    const ftreg::DenseTensor theta_hat = ftreg::read_tensor_file(theta_hat_path);
    const ftreg::DenseTensor theta_true = ftreg::read_tensor_file(theta_true_path);
    // Grid from the dataset when available, else the midpoint-uniform default.
    const ftreg::Grid grid = dataset
                                 ? dataset->data.grid()
                                 : ftreg::Grid::midpoint_uniform(theta_true.dim(0));
    ftreg::SplineSystem splines(grid);
    doc["rise"] = ftreg::rise(theta_hat, theta_true, splines);
  }

  if (folds > 0) {
    if (!dataset) throw std::invalid_argument("evaluate: --folds needs --data");
    if (rank_spec.empty()) throw std::invalid_argument("evaluate: --folds needs --rank");
    ftreg::SplineSystem splines(dataset->data.grid());
    ftreg::FitConfig config;
    config.rank = ftreg::parse_rank_spec(rank_spec);
    config.rho = rho;
    config.max_iter = max_iter;
    config.rel_tol = rel_tol;
    const std::uint64_t seed = global.seed ? *global.seed : 0;
    doc["cv"] = ftreg::kfold_cv(dataset->data, splines, config, folds, seed);
    doc["folds"] = folds;
    doc["cv_seed"] = seed;
  }

  if (doc.empty()) {
    throw std::invalid_argument(
        "evaluate: nothing to do (pass --theta-hat/--theta-true and/or --folds)");
  }
  write_json_file(out_dir / "evaluate.json", doc);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const GlobalOptions& global, const std::string& name,
                   const std::string& config_path, const fs::path& out_dir,
                   std::optional<std::size_t> replications) {
  ftreg::RunConfig config = ftreg::RunConfig::from_file(config_path);
  config.sim.seed = resolve_seed(global, &config);
  const unsigned threads =
      ftreg::resolve_threads(global.threads ? global.threads : config.threads);

  const ftreg::ExperimentKind kind = ftreg::parse_experiment_kind(name);
  const std::size_t reps = replications ? *replications : config.replications;
  const ftreg::ExperimentTable table =
      ftreg::run_experiment(kind, config.experiment(), reps, threads);
  write_experiment_tables(out_dir, table);

  json manifest;
  manifest["experiment"] = table.name;
  manifest["seed"] = config.sim.seed;
  manifest["replications"] = reps;
  manifest["threads"] = threads;
  write_json_file(out_dir / "manifest.json", manifest);
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional tensor regression"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "seed for all randomness");
  unsigned threads_value = 0;
  auto* threads_opt =
      app.add_option("--threads", threads_value, "worker threads (default: machine)");
  app.add_flag("--json-errors", global.json_errors, "report errors as JSON on stdout");

  std::string config_path, out_dir, data_dir;
  std::string rank_spec, ranks_spec = "table1", rho_grid_spec = "logspace(-4,2,13)";
  std::string theta_hat_path, theta_true_path, covariates_path, experiment_name;
  double rho = 0.0;
  int max_iter = 80;
  double rel_tol = 1e-8;
  std::size_t folds = 0;
  bool no_intercept = false;
  std::optional<std::size_t> replications;
  std::size_t replications_value = 0;

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  simulate->add_option("--config", config_path, "RunConfig JSON")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();

  auto* fit_cmd = app.add_subcommand("fit", "fit at a fixed rank and rho");
  fit_cmd->add_option("--data", data_dir, "dataset directory")->required();
  fit_cmd->add_option("--rank", rank_spec, "rank tuple, e.g. 2,3,3")->required();
  fit_cmd->add_option("--rho", rho, "penalty weight")->required();
  fit_cmd->add_option("--max-iter", max_iter, "iteration cap");
  fit_cmd->add_option("--rel-tol", rel_tol, "relative-change tolerance");
  fit_cmd->add_option("--out", out_dir, "output directory (default: data dir)");
  fit_cmd->add_option("--scalar-covariates", covariates_path,
                      "CSV of scalar covariates for a profiled fit");
  fit_cmd->add_flag("--no-intercept", no_intercept,
                    "covariates carry no all-ones intercept column");

  auto* tune = app.add_subcommand("tune", "select rank and rho by GCV");
  tune->add_option("--data", data_dir, "dataset directory")->required();
  tune->add_option("--ranks", ranks_spec, "rank grid: table1 or 2,3,3;2,4,3");
  tune->add_option("--rho-grid", rho_grid_spec, "rho grid: list or logspace(lo,hi,count)");
  tune->add_option("--max-iter", max_iter, "iteration cap");
  tune->add_option("--rel-tol", rel_tol, "relative-change tolerance");
  tune->add_option("--out", out_dir, "output directory (default: data dir)");

  auto* evaluate = app.add_subcommand("evaluate", "RISE against a truth and/or K-fold CV");
  evaluate->add_option("--theta-hat", theta_hat_path, "estimated coefficient file");
  evaluate->add_option("--theta-true", theta_true_path, "true coefficient file");
  evaluate->add_option("--data", data_dir, "dataset directory");
  evaluate->add_option("--rank", rank_spec, "rank tuple for CV refits");
  evaluate->add_option("--rho", rho, "penalty weight for CV refits");
  evaluate->add_option("--folds", folds, "number of CV folds");
  evaluate->add_option("--max-iter", max_iter, "iteration cap");
  evaluate->add_option("--rel-tol", rel_tol, "relative-change tolerance");
  evaluate->add_option("--out", out_dir, "output directory");

  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo sweep");
  experiment->add_option("--name", experiment_name,
                         "convergence|rho_sweep|sigma_sweep|n_sweep|p0_sweep|rank_table")
      ->required();
  experiment->add_option("--config", config_path, "RunConfig JSON")->required();
  experiment->add_option("--out", out_dir, "output directory")->required();
  auto* reps_opt = experiment->add_option("--replications", replications_value,
                                          "Monte Carlo replications");

  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) global.seed = seed_value;
  if (*threads_opt) global.threads = threads_value;
  if (*reps_opt) replications = replications_value;

  try {
    if (simulate->parsed()) {
      return cmd_simulate(global, config_path, out_dir);
    }
    if (fit_cmd->parsed()) {
      const fs::path out = out_dir.empty() ? fs::path(data_dir) : fs::path(out_dir);
      return cmd_fit(global, data_dir, out, rank_spec, rho, max_iter, rel_tol,
                     covariates_path, no_intercept);
    }
    if (tune->parsed()) {
      const fs::path out = out_dir.empty() ? fs::path(data_dir) : fs::path(out_dir);
      return cmd_tune(global, data_dir, out, ranks_spec, rho_grid_spec, max_iter, rel_tol);
    }
    if (evaluate->parsed()) {
      const fs::path out = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
      return cmd_evaluate(global, theta_hat_path, theta_true_path, data_dir, rank_spec,
                          rho, folds, max_iter, rel_tol, out);
    }
    if (experiment->parsed()) {
      return cmd_experiment(global, experiment_name, config_path, out_dir, replications);
    }
  } catch (const std::exception& e) {
    if (global.json_errors) {
      json err;
      err["error"] = e.what();
      std::cout << err.dump() << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
  }
  return 0;
}
