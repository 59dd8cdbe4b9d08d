#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ftreg/simulate.hpp"

namespace ftreg {

// JSON run configuration mirroring the simulation, fit and selection
// settings. Parsing is strict: unknown keys and wrong types are rejected
// before any compute starts.
struct RunConfig {
  SimConfig sim;
  FitConfig fit;  // rank mirrors sim.rank unless set separately
  std::vector<double> rho_grid = logspace(-4.0, 2.0, 13);
  std::vector<std::vector<std::size_t>> rank_grid = table1_rank_candidates();
  std::vector<double> sigma_grid = {0.02, 0.04, 0.06, 0.08, 0.10};
  std::vector<std::size_t> n_grid = {125, 250, 500, 1000};
  std::vector<std::size_t> p0_grid = {3, 6, 9, 12, 15, 18};
  std::size_t replications = 100;
  std::optional<unsigned> threads;
  std::string output;
  bool seed_given = false;

  ExperimentConfig experiment() const;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);
};

// "1e-4,1e-2,1" or "logspace(-4,2,13)".
std::vector<double> parse_rho_grid_spec(const std::string& spec);
// "2,3,3"
std::vector<std::size_t> parse_rank_spec(const std::string& spec);
// "table1" or "2,3,3;2,4,3"
std::vector<std::vector<std::size_t>> parse_rank_grid_spec(const std::string& spec);

}  // namespace ftreg
