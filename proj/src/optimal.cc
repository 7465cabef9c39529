#include "noc/optimal.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "noc/solver.hpp"

namespace noc {

long long permutation_count(int L, int k) {
  if (k < 0 || L < 0) throw ContractError("permutation_count: negative argument");
  if (k > L) return 0;
  long long r = 1;
  for (int i = 0; i < k; ++i) {
    const long long f = L - i;
    if (r > std::numeric_limits<long long>::max() / f) return std::numeric_limits<long long>::max();
    r *= f;
  }
  return r;
}

namespace {

std::vector<ClusterRef> all_clusters(const Scenario& sc) {
  std::vector<ClusterRef> refs;
  for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
    for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
      refs.push_back(ClusterRef{sc.compensating[i], static_cast<int>(l)});
    }
  }
  return refs;
}

}  // namespace

void for_each_association(const Scenario& sc, const EnumerationBudget& budget,
                          const std::function<void(const AssociationMap&)>& visit) {
  const auto refs = all_clusters(sc);
  const auto& users = sc.failed_users;
  if (users.size() > refs.size()) {
    throw ContractError("more failed users than clusters; no injective association exists");
  }
  const auto start = std::chrono::steady_clock::now();
  long long done = 0;
  std::vector<char> used(refs.size(), 0);
  AssociationMap current;

  std::function<void(std::size_t)> rec = [&](std::size_t u) {
    if (u == users.size()) {
      if (done >= budget.max_associations) {
        throw BudgetExceeded("association budget of " + std::to_string(budget.max_associations) +
                                 " exhausted",
                             done);
      }
      if (std::isfinite(budget.max_seconds)) {
        const double el =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (el > budget.max_seconds) {
          throw BudgetExceeded("time budget exhausted after " + std::to_string(done) +
                                   " associations",
                               done);
        }
      }
      visit(current);
      ++done;
      return;
    }
    for (std::size_t c = 0; c < refs.size(); ++c) {
      if (used[c]) continue;
      used[c] = 1;
      current.entries[users[u]] = refs[c];
      rec(u + 1);
      current.entries.erase(users[u]);
      used[c] = 0;
    }
  };
  rec(0);
}

std::vector<AssociationMap> enumerate_associations(const Scenario& sc,
                                                   const EnumerationBudget& budget) {
  std::vector<AssociationMap> out;
  for_each_association(sc, budget, [&](const AssociationMap& a) { out.push_back(a); });
  return out;
}

OptResult opt_noc(const Scenario& sc, Mode mode, const barrier::SolverConfig& cfg,
                  const EnumerationBudget& budget, const PowerSolution* pre_outage) {
  PowerSolution pre_local;
  if (pre_outage == nullptr) {
    auto pre = solve_pre_outage(sc, cfg);
    if (!pre.feasible) {
      throw ConfigError("pre-outage allocation infeasible: " + pre.diagnostic);
    }
    pre_local = std::move(pre.solution);
    pre_outage = &pre_local;
  }
  const PaMode pa = mode == Mode::interference ? PaMode::compensation_interference
                                               : PaMode::compensation;

  // Per-BS subproblem identity: which failed user sits in which cluster, plus
  // the caps (they depend on neighbours' assignments in interference mode).
  using Key = std::tuple<int, std::vector<std::pair<int, int>>, std::vector<double>>;
  std::map<Key, PaResult> memo;

  OptResult best;
  for_each_association(sc, budget, [&](const AssociationMap& assoc) {
    ++best.evaluated;
    PowerSolution sol;
    bool ok = true;
    for (std::size_t i = 0; i < sc.compensating.size() && ok; ++i) {
      const int bs_id = sc.compensating[i];
      std::vector<std::pair<int, int>> mine;
      for (const auto& [u, ref] : assoc.entries) {
        if (ref.bs_id == bs_id) mine.emplace_back(ref.cluster, u);
      }
      if (mine.empty() && mode == Mode::isolated) {
        sol.per_bs.push_back(pre_outage->per_bs[i]);
        continue;
      }
      PaInstance inst = make_instance(sc, bs_id, pa, &assoc);
      if (mine.empty()) inst.mode = PaMode::pre_outage;
      Key key{bs_id, mine, inst.caps};
      auto it = memo.find(key);
      if (it == memo.end()) {
        it = memo.emplace(std::move(key), solve_instance(inst, cfg)).first;
        ++best.distinct_solves;
      }
      if (!it->second.ok()) {
        ok = false;
        break;
      }
      sol.per_bs.push_back(it->second.powers);
    }
    if (!ok) {
      ++best.infeasible;
      return;
    }
    sol.objective = failed_objective(sc, assoc, sol, mode);
    if (sol.objective > best.objective) {
      best.feasible = true;
      best.objective = sol.objective;
      best.assoc = assoc;
      best.solution = std::move(sol);
    }
  });
  return best;
}

TableOptimum optimal_table_assignment(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  const std::size_t cols = rows == 0 ? 0 : table[0].size();
  if (rows > cols) throw ContractError("optimal_table_assignment: more rows than columns");
  TableOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<int> current(rows, -1);
  std::vector<char> used(cols, 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t r, double acc) {
    if (r == rows) {
      ++best.evaluated;
      if (acc > best.value) {
        best.value = acc;
        best.assignment = current;
      }
      return;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      current[r] = static_cast<int>(c);
      rec(r + 1, acc + table[r][c]);
      used[c] = 0;
    }
  };
  rec(0, 0.0);
  return best;
}

}  // namespace noc
