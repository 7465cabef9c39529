#include "noc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include "json.hpp"
#include "noc/association.hpp"
#include "noc/solver.hpp"

namespace noc {

namespace {

using nlohmann::json;

/// Labeled samples of one scenario, or nullopt when it is infeasible.
std::optional<std::vector<LabeledSample>> label_scenario(const DatasetConfig& cfg, int index) {
  TopologyConfig tc = cfg.topology;
  tc.seed = cfg.seed + static_cast<std::uint64_t>(index);
  const Scenario sc = build_scenario(generate_topology(tc), cfg.params, cfg.layout);
  const auto pre = solve_pre_outage(sc, cfg.solver);
  if (!pre.feasible) return std::nullopt;
  const AssociationMap assoc = heuristic_association(sc, pre.solution, cfg.mode);
  const auto comp = solve_compensation(sc, assoc, cfg.mode, cfg.solver, &pre.solution);
  if (!comp.feasible) return std::nullopt;

  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
    const int bs_id = sc.compensating[i];
    const bool serves = std::any_of(assoc.entries.begin(), assoc.entries.end(),
                                    [&](const auto& e) { return e.second.bs_id == bs_id; });
    if (!serves) continue;
    LabeledSample s;
    s.scenario_seed = tc.seed;
    s.bs_id = bs_id;
    s.q = sc.params.cluster_size;
    s.H = build_input(sc, bs_id, assoc);
    s.P = power_matrix(sc, bs_id, assoc, comp.solution.per_bs[i]);
    s.L = static_cast<int>(s.H.cols());
    json meta = {{"n_compensating", tc.n_compensating},
                 {"users_per_cell", tc.users_per_cell},
                 {"n_failed", tc.n_failed},
                 {"mode", to_string(cfg.mode)},
                 {"s_min", sc.params.s_min},
                 {"p_max_mw", sc.params.p_max.value},
                 {"sigma2_mw", sc.params.sigma2.value},
                 {"p_tol_mw", sc.params.p_tol.value},
                 {"extra_floor_mw", sc.extra_floor(bs_id, cfg.mode)},
                 {"failed_se", comp.per_bs[i].objective},
                 {"fallback_users", assoc.fallback.size()}};
    s.meta = meta.dump();
    out.push_back(std::move(s));
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (std::isnan(M(r, c))) {
        row.push_back(nullptr);
      } else {
        row.push_back(M(r, c));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw ConfigError("dataset: matrix has the wrong number of rows");
  }
  Eigen::MatrixXd M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      throw ConfigError("dataset: matrix has the wrong number of columns");
    }
    for (int c = 0; c < cols; ++c) {
      M(r, c) = j[r][c].is_null() ? std::numeric_limits<double>::quiet_NaN() : j[r][c].get<double>();
    }
  }
  return M;
}

}  // namespace

std::vector<LabeledSample> generate_dataset(const DatasetConfig& cfg, DatasetStats* stats) {
  if (cfg.n_samples < 1) throw ConfigError("dataset: n_samples must be >= 1");
  if (cfg.jobs < 1) throw ConfigError("dataset: jobs must be >= 1");
  std::vector<LabeledSample> out;
  DatasetStats st;
  int next = 0;
  while (st.emitted < cfg.n_samples) {
    const int batch = cfg.jobs;
    std::vector<std::optional<std::vector<LabeledSample>>> results(batch);
    std::vector<std::exception_ptr> errors(batch);
    auto work = [&](int k) {
      try {
        results[k] = label_scenario(cfg, next + k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    };
    if (batch == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int k = 0; k < batch; ++k) pool.emplace_back(work, k);
      for (auto& t : pool) t.join();
    }
    for (int k = 0; k < batch && st.emitted < cfg.n_samples; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      ++st.scenarios;
      if (!results[k]) {
        ++st.infeasible;
        continue;
      }
      for (auto& s : *results[k]) {
        if (st.emitted == cfg.n_samples) break;
        s.id = st.emitted++;
        out.push_back(std::move(s));
      }
    }
    next += batch;
    if (st.scenarios >= 20 && 2 * st.infeasible > st.scenarios) {
      throw ConfigError("dataset: " + std::to_string(st.infeasible) + " of " +
                        std::to_string(st.scenarios) +
                        " scenarios infeasible (> 50%); lower s_min or the failed-user count");
    }
  }
  if (2 * st.infeasible > st.scenarios) {
    throw ConfigError("dataset: more than half of the scenarios were infeasible");
  }
  if (stats != nullptr) *stats = st;
  return out;
}

DatasetSplit split_dataset(const std::vector<LabeledSample>& samples, std::array<double, 3> ratios,
                           std::uint64_t seed, int augment) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9 || std::any_of(ratios.begin(), ratios.end(),
                                                [](double r) { return r < 0.0; })) {
    throw ConfigError("split: ratios must be non-negative and sum to 1");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n = static_cast<double>(samples.size());
  const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * n));
  const auto n_val =
      std::min(samples.size() - n_train, static_cast<std::size_t>(std::llround(ratios[1] * n)));

  DatasetSplit out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& s = samples[order[k]];
    if (k < n_train) {
      out.train.push_back(s);
    } else if (k < n_train + n_val) {
      out.val.push_back(s);
    } else {
      out.test.push_back(s);
    }
  }
  if (augment > 0) {
    long long next_id = 0;
    for (const auto& s : samples) next_id = std::max(next_id, s.id + 1);
    const std::size_t originals = out.train.size();
    for (std::size_t k = 0; k < originals; ++k) {
      for (auto& a : augment_permutations(out.train[k], augment,
                                          seed ^ (0x9e3779b97f4a7c15ULL * (out.train[k].id + 1)))) {
        a.id = next_id++;
        out.train.push_back(std::move(a));
      }
    }
  }
  return out;
}

void write_jsonl(std::ostream& out, const std::vector<LabeledSample>& samples) {
  for (const auto& s : samples) {
    json j = {{"id", s.id},
              {"parent_id", s.parent_id < 0 ? json(nullptr) : json(s.parent_id)},
              {"scenario_seed", s.scenario_seed},
              {"bs_id", s.bs_id},
              {"q", s.q},
              {"L", s.L},
              {"H", matrix_to_json(s.H)},
              {"P", matrix_to_json(s.P)},
              {"meta", json::parse(s.meta)}};
    out << j.dump() << '\n';
  }
  if (!out) throw ConfigError("dataset: write failed");
}

std::vector<LabeledSample> read_jsonl(std::istream& in) {
  std::vector<LabeledSample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      LabeledSample s;
      s.id = j.at("id");
      s.parent_id = j.at("parent_id").is_null() ? -1 : j.at("parent_id").get<long long>();
      s.scenario_seed = j.at("scenario_seed");
      s.bs_id = j.at("bs_id");
      s.q = j.at("q");
      s.L = j.at("L");
      s.H = matrix_from_json(j.at("H"), s.q + 1, s.L);
      s.P = matrix_from_json(j.at("P"), s.q + 1, s.L);
      s.meta = j.contains("meta") ? j.at("meta").dump() : "{}";
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ConfigError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::string& path, const std::vector<LabeledSample>& samples) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  write_jsonl(out, samples);
}

std::vector<LabeledSample> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path);
  return read_jsonl(in);
}

}  // namespace noc
