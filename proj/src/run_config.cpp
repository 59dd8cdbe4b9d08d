#include "ftreg/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ftreg {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.contains(it.key())) {
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config: field \"") + key +
                                "\" has the wrong type");
  }
}

}  // namespace

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig out;
  out.base = sim;
  out.fit = fit;
  out.rho_grid = rho_grid;
  out.rank_grid = rank_grid;
  out.sigma_grid = sigma_grid;
  out.n_grid = n_grid;
  out.p0_grid = p0_grid;
  return out;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");

  static const std::set<std::string> known = {
      "n",        "dims",     "rank",       "kl_terms",     "sigma_x",  "sigma_y",
      "seed",     "grid",     "response",   "rho",          "rho_grid", "ranks",
      "max_iter", "rel_tol",  "replications", "threads",    "output",   "sigma_grid",
      "n_grid",   "p0_grid"};
  reject_unknown_keys(doc, known, "top level");

  RunConfig cfg;
  read_field(doc, "n", cfg.sim.n);
  read_field(doc, "dims", cfg.sim.dims);
  read_field(doc, "rank", cfg.sim.rank);
  read_field(doc, "kl_terms", cfg.sim.kl_terms);
  read_field(doc, "sigma_x", cfg.sim.sigma_x);
  read_field(doc, "sigma_y", cfg.sim.sigma_y);
  if (doc.contains("seed")) {
    read_field(doc, "seed", cfg.sim.seed);
    cfg.seed_given = true;
  }
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (!g.is_object()) throw std::invalid_argument("config: grid must be an object");
    reject_unknown_keys(g, {"points", "lo", "hi"}, "grid");
    read_field(g, "points", cfg.sim.grid_points);
    read_field(g, "lo", cfg.sim.t_lo);
    read_field(g, "hi", cfg.sim.t_hi);
  }
  if (doc.contains("response")) {
    std::string mode;
    read_field(doc, "response", mode);
    if (mode == "integral") {
      cfg.sim.response = SimConfig::Response::integral;
    } else if (mode == "discretized") {
      cfg.sim.response = SimConfig::Response::discretized;
    } else {
      throw std::invalid_argument("config: response must be integral or discretized");
    }
  }

  read_field(doc, "rho", cfg.fit.rho);
  read_field(doc, "max_iter", cfg.fit.max_iter);
  read_field(doc, "rel_tol", cfg.fit.rel_tol);
  cfg.fit.rank = cfg.sim.rank;

  read_field(doc, "rho_grid", cfg.rho_grid);
  if (doc.contains("ranks")) {
    read_field(doc, "ranks", cfg.rank_grid);
  }
  read_field(doc, "sigma_grid", cfg.sigma_grid);
  read_field(doc, "n_grid", cfg.n_grid);
  read_field(doc, "p0_grid", cfg.p0_grid);
  read_field(doc, "replications", cfg.replications);
  if (doc.contains("threads")) {
    unsigned t = 0;
    read_field(doc, "threads", t);
    cfg.threads = t;
  }
  read_field(doc, "output", cfg.output);

  if (cfg.sim.dims.empty()) throw std::invalid_argument("config: dims must not be empty");
  if (cfg.sim.rank.size() != cfg.sim.dims.size()) {
    throw std::invalid_argument("config: rank and dims must have the same order");
  }
  if (cfg.sim.sigma_x < 0 || cfg.sim.sigma_y < 0) {
    throw std::invalid_argument("config: noise standard deviations must be >= 0");
  }
  if (cfg.sim.kl_terms < 1) throw std::invalid_argument("config: kl_terms must be >= 1");
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::vector<double> parse_rho_grid_spec(const std::string& spec) {
  const std::string logspace_prefix = "logspace(";
  if (spec.rfind(logspace_prefix, 0) == 0 && spec.back() == ')') {
    const std::string inner = spec.substr(logspace_prefix.size(),
                                          spec.size() - logspace_prefix.size() - 1);
    std::istringstream ss(inner);
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    char c1 = 0, c2 = 0;
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ',' || c2 != ',' || count == 0) {
      throw std::invalid_argument("bad logspace spec: " + spec);
    }
    return logspace(lo, hi, count);
  }
  std::vector<double> out;
  std::istringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stod(token));
  }
  if (out.empty()) throw std::invalid_argument("empty rho grid spec");
  return out;
}

std::vector<std::size_t> parse_rank_spec(const std::string& spec) {
  std::vector<std::size_t> out;
  std::istringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const long value = std::stol(token);
    if (value < 1) throw std::invalid_argument("rank entries must be positive");
    out.push_back(static_cast<std::size_t>(value));
  }
  if (out.empty()) throw std::invalid_argument("empty rank spec");
  return out;
}

std::vector<std::vector<std::size_t>> parse_rank_grid_spec(const std::string& spec) {
  if (spec == "table1") return table1_rank_candidates();
  std::vector<std::vector<std::size_t>> out;
  std::istringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ';')) {
    if (token.empty()) continue;
    out.push_back(parse_rank_spec(token));
  }
  if (out.empty()) throw std::invalid_argument("empty rank grid spec");
  return out;
}

}  // namespace ftreg
