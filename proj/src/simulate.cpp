#include "ftreg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ftreg/kernels.hpp"
#include "ftreg/parallel.hpp"
#include "ftreg/quadrature.hpp"
#include "ftreg/rng.hpp"

namespace ftreg {

Grid SimConfig::make_grid() const {
  if (dims.empty()) throw std::invalid_argument("sim config: dims must not be empty");
  if (grid_points.empty()) {
    return Grid::midpoint_uniform(dims[0], t_lo, t_hi);
  }
  if (grid_points.size() != dims[0]) {
    throw std::invalid_argument("sim config: grid point count must equal p_0");
  }
  return Grid(grid_points, t_lo, t_hi);
}

SimTruth gen_truth(const SimConfig& config) {
  for (std::size_t d = 0; d < config.dims.size(); ++d) {
    if (config.rank.size() != config.dims.size() || config.rank[d] == 0 ||
        config.rank[d] > config.dims[d]) {
      throw std::invalid_argument("sim config: invalid rank tuple");
    }
  }
  SimTruth truth;
  rng::Stream core_stream =
      rng::Stream::derive(config.seed, config.replication, rng::Role::truth_core);
  truth.tucker.core = DenseTensor(config.rank);
  for (double& v : truth.tucker.core.values()) v = core_stream.normal();

  rng::Stream factor_stream =
      rng::Stream::derive(config.seed, config.replication, rng::Role::truth_factor);
  truth.tucker.factors.resize(config.dims.size());
  for (std::size_t d = 0; d < config.dims.size(); ++d) {
    Eigen::MatrixXd gauss(config.dims[d], config.rank[d]);
    for (Eigen::Index j = 0; j < gauss.cols(); ++j) {
      for (Eigen::Index i = 0; i < gauss.rows(); ++i) {
        gauss(i, j) = factor_stream.normal();
      }
    }
    truth.tucker.factors[d] = qr_orthonormal(gauss);
  }
  truth.theta = truth.tucker.to_dense();
  return truth;
}

std::vector<Eigen::VectorXd> sine_moments(const SplineSystem& splines, int kl_terms,
                                          std::size_t nodes) {
  const Grid& grid = splines.grid();
  const double lo = grid.t_lo();
  const double span = grid.domain_length();
  const std::vector<double> base_breaks = grid.breaks();
  const auto& gl = GaussLegendre::rule(nodes);

  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(kl_terms));
  for (int k = 1; k <= kl_terms; ++k) {
    // Refine so each piece spans at most half a period of sin(k pi u);
    // 8-point Gauss-Legendre is then far below 1e-12 error.
    double max_width_u = 0.0;
    for (std::size_t i = 0; i + 1 < base_breaks.size(); ++i) {
      max_width_u = std::max(max_width_u, (base_breaks[i + 1] - base_breaks[i]) / span);
    }
    const std::size_t pieces =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k * max_width_u)));
    const std::vector<double> breaks = refine_breaks(base_breaks, pieces);

    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
      const double half = 0.5 * (breaks[i + 1] - breaks[i]);
      for (std::size_t q = 0; q < nodes; ++q) {
        const double t = mid + half * gl.nodes[q];
        const double u = (t - lo) / span;
        const double weight =
            half * gl.weights[q] * std::sin(static_cast<double>(k) * std::numbers::pi * u);
        s += weight * splines.cardinal_weights(t);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

SimDataset gen_dataset(const SimConfig& config, const SimTruth& truth) {
  if (truth.theta.dims() != config.dims) {
    throw std::invalid_argument("gen_dataset: truth dims do not match config");
  }
  const Grid grid = config.make_grid();
  const std::size_t n = config.n;
  const std::size_t p0 = config.dims[0];
  const std::size_t slice_size = truth.theta.size();
  const std::size_t rest = slice_size / p0;
  if (n == 0) throw std::invalid_argument("gen_dataset: n must be positive");

  // Mode-0 contractions of the truth with the sine moments: the noiseless
  // integral response is sum_k k^{-1} <Ups_ik, theta x_0 s_k'>.
  std::vector<std::vector<double>> contracted;
  if (config.response == SimConfig::Response::integral) {
    SplineSystem splines(grid);
    const std::vector<Eigen::VectorXd> moments = sine_moments(splines, config.kl_terms);
    contracted.reserve(moments.size());
    for (const auto& s : moments) {
      DenseTensor c = mode_product(truth.theta, s.transpose(), 0);
      contracted.push_back(c.values());
    }
  }

  // Per-knot basis values phi_k(t_j) = sin(k pi u_j).
  std::vector<std::vector<double>> basis_at_knots(
      static_cast<std::size_t>(config.kl_terms), std::vector<double>(p0));
  for (int k = 1; k <= config.kl_terms; ++k) {
    for (std::size_t j = 0; j < p0; ++j) {
      const double u = (grid.point(j) - grid.t_lo()) / grid.domain_length();
      basis_at_knots[static_cast<std::size_t>(k - 1)][j] =
          std::sin(static_cast<double>(k) * std::numbers::pi * u);
    }
  }

  rng::Stream score_stream =
      rng::Stream::derive(config.seed, config.replication, rng::Role::kl_scores);
  rng::Stream obs_stream =
      rng::Stream::derive(config.seed, config.replication, rng::Role::obs_noise);
  rng::Stream response_stream =
      rng::Stream::derive(config.seed, config.replication, rng::Role::response_noise);

  std::vector<std::size_t> raw_dims;
  raw_dims.push_back(n);
  raw_dims.insert(raw_dims.end(), config.dims.begin(), config.dims.end());
  DenseTensor raw(raw_dims);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));

  std::vector<double> slice(slice_size);
  std::vector<double> scores(rest);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(slice.begin(), slice.end(), 0.0);
    double signal = 0.0;
    for (int k = 1; k <= config.kl_terms; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k - 1);
      const double amp = 1.0 / static_cast<double>(k);
      for (double& v : scores) v = score_stream.normal();
      for (std::size_t r = 0; r < rest; ++r) {
        const double value = amp * scores[r];
        double* base = slice.data() + p0 * r;
        const double* phi = basis_at_knots[kk].data();
        for (std::size_t j = 0; j < p0; ++j) base[j] += value * phi[j];
      }
      if (config.response == SimConfig::Response::integral) {
        signal += amp * kernels::dot(scores.data(), contracted[kk].data(), rest);
      }
    }
    if (config.response == SimConfig::Response::discretized) {
      // y_i = sum_j dt_j <X_i(t_j), theta_j> on the noiseless samples.
      const double* theta = truth.theta.data();
      for (std::size_t lin = 0; lin < slice_size; ++lin) {
        signal += grid.weight(lin % p0) * slice[lin] * theta[lin];
      }
    }

    double* dst = raw.data();
    if (config.sigma_x > 0.0) {
      for (std::size_t lin = 0; lin < slice_size; ++lin) {
        dst[i + n * lin] = slice[lin] + config.sigma_x * obs_stream.normal();
      }
    } else {
      for (std::size_t lin = 0; lin < slice_size; ++lin) dst[i + n * lin] = slice[lin];
    }
    const double noise =
        config.sigma_y > 0.0 ? config.sigma_y * response_stream.normal() : 0.0;
    y(static_cast<Eigen::Index>(i)) = signal + noise;
  }

  RegressionData data = RegressionData::from_raw(raw, y, grid);
  return SimDataset{std::move(raw), std::move(y), std::move(data)};
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "convergence") return ExperimentKind::convergence;
  if (name == "rho_sweep") return ExperimentKind::rho_sweep;
  if (name == "sigma_sweep") return ExperimentKind::sigma_sweep;
  if (name == "n_sweep") return ExperimentKind::n_sweep;
  if (name == "p0_sweep") return ExperimentKind::p0_sweep;
  if (name == "rank_table") return ExperimentKind::rank_table;
  throw std::invalid_argument("unknown experiment name: " + name);
}

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::rho_sweep: return "rho_sweep";
    case ExperimentKind::sigma_sweep: return "sigma_sweep";
    case ExperimentKind::n_sweep: return "n_sweep";
    case ExperimentKind::p0_sweep: return "p0_sweep";
    case ExperimentKind::rank_table: return "rank_table";
  }
  throw std::invalid_argument("unknown experiment kind");
}

namespace {

std::string format_value(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::string format_rank(const std::vector<std::size_t>& rank) {
  std::ostringstream ss;
  for (std::size_t d = 0; d < rank.size(); ++d) {
    if (d) ss << ',';
    ss << rank[d];
  }
  return ss.str();
}

// One replication of (generate, select rho by GCV) for a fixed setup.
struct ReplicationOutcome {
  SelectionReport report;
  SimTruth truth;
  SimDataset dataset;
};

ReplicationOutcome run_selection_replication(const ExperimentConfig& config,
                                             const SimConfig& sim,
                                             const std::vector<std::size_t>& rank) {
  SimTruth truth = gen_truth(sim);
  SimDataset dataset = gen_dataset(sim, truth);
  SplineSystem splines(dataset.data.grid());
  SelectionOptions options;
  options.base = config.fit;
  options.truth = &truth.theta;
  SelectionReport report =
      select_rho(dataset.data, splines, rank, config.rho_grid, options);
  return ReplicationOutcome{std::move(report), std::move(truth), std::move(dataset)};
}

ExperimentRow chosen_row(const SelectionReport& report, const std::string& sweep_value,
                         std::uint64_t replication) {
  const SelectionCandidate& best = report.candidates[report.chosen];
  ExperimentRow row;
  row.sweep_value = sweep_value;
  row.replication = replication;
  row.gcv = best.gcv;
  row.rise = best.rise;
  row.iterations = best.iterations;
  row.converged = best.converged;
  return row;
}

ExperimentRow failed_row(const std::string& sweep_value, std::uint64_t replication,
                         const std::string& what) {
  ExperimentRow row;
  row.sweep_value = sweep_value;
  row.replication = replication;
  row.error = what;
  return row;
}

void summarize(ExperimentTable& table) {
  std::vector<std::string> order;
  for (const auto& row : table.rows) {
    if (std::find(order.begin(), order.end(), row.sweep_value) == order.end()) {
      order.push_back(row.sweep_value);
    }
  }
  for (const auto& key : order) {
    ExperimentSummaryRow s;
    s.sweep_value = key;
    double gcv_sum = 0.0, gcv_sq = 0.0, rise_sum = 0.0, rise_sq = 0.0;
    for (const auto& row : table.rows) {
      if (row.sweep_value != key || !row.error.empty()) continue;
      ++s.replications;
      gcv_sum += row.gcv;
      gcv_sq += row.gcv * row.gcv;
      rise_sum += row.rise;
      rise_sq += row.rise * row.rise;
    }
    if (s.replications > 0) {
      const double m = static_cast<double>(s.replications);
      s.gcv_mean = gcv_sum / m;
      s.rise_mean = rise_sum / m;
      if (s.replications > 1) {
        s.gcv_std = std::sqrt(std::max(0.0, (gcv_sq - m * s.gcv_mean * s.gcv_mean) / (m - 1.0)));
        s.rise_std =
            std::sqrt(std::max(0.0, (rise_sq - m * s.rise_mean * s.rise_mean) / (m - 1.0)));
      }
    }
    table.summary.push_back(std::move(s));
  }
}

}  // namespace

ExperimentTable run_experiment(ExperimentKind kind, const ExperimentConfig& config,
                               std::size_t replications, unsigned threads) {
  if (replications == 0) throw std::invalid_argument("experiment needs replications >= 1");
  ExperimentTable table;
  table.name = experiment_kind_name(kind);

  std::vector<std::vector<ExperimentRow>> slots(replications);
  auto run_rep = [&](std::size_t rep) {
    SimConfig sim = config.base;
    sim.replication = rep;
    std::vector<ExperimentRow>& out = slots[rep];
    switch (kind) {
      case ExperimentKind::convergence: {
        try {
          ReplicationOutcome outcome =
              run_selection_replication(config, sim, config.base.rank);
          // Refit at the selected rho recording the relative error per
          // iteration against the known truth.
          SplineSystem splines(outcome.dataset.data.grid());
          FitConfig refit = config.fit;
          refit.rank = config.base.rank;
          refit.rho = outcome.report.candidates[outcome.report.chosen].rho;
          refit.truth = &outcome.truth.theta;
          FitResult res = fit(outcome.dataset.data, splines, refit);
          for (std::size_t k = 0; k < res.error_trace.size(); ++k) {
            ExperimentRow row;
            row.sweep_value = std::to_string(k);
            row.replication = rep;
            row.gcv = outcome.report.candidates[outcome.report.chosen].gcv;
            row.rise = res.error_trace[k];
            row.iterations = static_cast<int>(k);
            row.converged = res.converged;
            out.push_back(std::move(row));
          }
        } catch (const std::exception& e) {
          out.push_back(failed_row("0", rep, e.what()));
        }
        break;
      }
      case ExperimentKind::rho_sweep: {
        try {
          std::vector<double> grid_with_zero = config.rho_grid;
          if (std::find(grid_with_zero.begin(), grid_with_zero.end(), 0.0) ==
              grid_with_zero.end()) {
            grid_with_zero.push_back(0.0);
          }
          SimTruth truth = gen_truth(sim);
          SimDataset dataset = gen_dataset(sim, truth);
          SplineSystem splines(dataset.data.grid());
          SelectionOptions options;
          options.base = config.fit;
          options.truth = &truth.theta;
          SelectionReport report = select_rho(dataset.data, splines, config.base.rank,
                                              grid_with_zero, options);
          for (const auto& candidate : report.candidates) {
            ExperimentRow row;
            row.sweep_value = format_value(candidate.rho);
            row.replication = rep;
            row.gcv = candidate.gcv;
            row.rise = candidate.rise;
            row.iterations = candidate.iterations;
            row.converged = candidate.converged;
            if (std::isnan(candidate.gcv)) row.error = "candidate failed";
            out.push_back(std::move(row));
          }
        } catch (const std::exception& e) {
          out.push_back(failed_row("all", rep, e.what()));
        }
        break;
      }
      case ExperimentKind::sigma_sweep: {
        for (double sigma : config.sigma_grid) {
          SimConfig point = sim;
          point.sigma_y = sigma;
          const std::string key = format_value(sigma);
          try {
            ReplicationOutcome outcome =
                run_selection_replication(config, point, config.base.rank);
            out.push_back(chosen_row(outcome.report, key, rep));
          } catch (const std::exception& e) {
            out.push_back(failed_row(key, rep, e.what()));
          }
        }
        break;
      }
      case ExperimentKind::n_sweep: {
        for (std::size_t n_value : config.n_grid) {
          SimConfig point = sim;
          point.n = n_value;
          const std::string key = std::to_string(n_value);
          try {
            ReplicationOutcome outcome =
                run_selection_replication(config, point, config.base.rank);
            out.push_back(chosen_row(outcome.report, key, rep));
          } catch (const std::exception& e) {
            out.push_back(failed_row(key, rep, e.what()));
          }
        }
        break;
      }
      case ExperimentKind::p0_sweep: {
        for (std::size_t p0 : config.p0_grid) {
          SimConfig point = sim;
          point.dims[0] = p0;
          point.grid_points.clear();
          const std::string key = std::to_string(p0);
          try {
            ReplicationOutcome outcome =
                run_selection_replication(config, point, config.base.rank);
            out.push_back(chosen_row(outcome.report, key, rep));
          } catch (const std::exception& e) {
            out.push_back(failed_row(key, rep, e.what()));
          }
        }
        break;
      }
      case ExperimentKind::rank_table: {
        SimTruth truth;
        bool generated = false;
        try {
          truth = gen_truth(sim);
          SimDataset dataset = gen_dataset(sim, truth);
          generated = true;
          SplineSystem splines(dataset.data.grid());
          SelectionOptions options;
          options.base = config.fit;
          options.truth = &truth.theta;
          for (const auto& rank : config.rank_grid) {
            const std::string key = format_rank(rank);
            try {
              SelectionReport report =
                  select_rho(dataset.data, splines, rank, config.rho_grid, options);
              out.push_back(chosen_row(report, key, rep));
            } catch (const std::exception& e) {
              out.push_back(failed_row(key, rep, e.what()));
            }
          }
        } catch (const std::exception& e) {
          if (!generated) out.push_back(failed_row("all", rep, e.what()));
        }
        break;
      }
    }
  };

  parallel_for(replications, threads, run_rep);

  for (auto& slot : slots) {
    for (auto& row : slot) table.rows.push_back(std::move(row));
  }
  summarize(table);
  return table;
}

}  // namespace ftreg
