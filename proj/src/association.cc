#include "noc/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace noc {

double min_power_top_user(double h_top, double s_min, double sigma2, double extra_floor) {
  return (sigma2 + extra_floor) / h_top * (std::exp2(s_min) - 1.0);
}

Prop1Result prop1_powers(std::span<const double> gains, std::span<const double> pre_powers,
                         double s_min, double sigma2, double extra_floor) {
  if (gains.empty() || gains.size() != pre_powers.size()) {
    throw ContractError("prop1_powers: empty cluster or size mismatch");
  }
  if (!(pre_powers[0] > 0.0)) throw ContractError("prop1_powers: degenerate cluster (top power 0)");
  Prop1Result r;
  r.delta = std::clamp(min_power_top_user(gains[0], s_min, sigma2, extra_floor) / pre_powers[0],
                       0.0, 1.0);
  for (double p : pre_powers) r.powers.push_back(r.delta * p);
  return r;
}

std::vector<double> prop2_powers(std::span<const double> gains, std::span<const double> pre_powers,
                                 double s_min, double sigma2, double extra_floor) {
  if (gains.empty() || gains.size() != pre_powers.size()) {
    throw ContractError("prop2_powers: empty cluster or size mismatch");
  }
  if (!(pre_powers[0] > 0.0)) throw ContractError("prop2_powers: degenerate cluster (top power 0)");
  const double floor = sigma2 + extra_floor;
  std::vector<double> out(gains.size());
  out[0] = std::min(min_power_top_user(gains[0], s_min, sigma2, extra_floor), pre_powers[0]);
  double post_sum = out[0];
  double pre_sum = pre_powers[0];
  for (std::size_t k = 1; k < gains.size(); ++k) {
    out[k] = pre_powers[k] * (gains[k] * post_sum + floor) / (gains[k] * pre_sum + floor);
    post_sum += out[k];
    pre_sum += pre_powers[k];
  }
  return out;
}

double budget_of(std::span<const double> pre_powers, std::span<const double> post_powers) {
  const double pre = std::accumulate(pre_powers.begin(), pre_powers.end(), 0.0);
  const double post = std::accumulate(post_powers.begin(), post_powers.end(), 0.0);
  const double d = pre - post;
  if (d < -1e-12 * std::max(1.0, pre)) {
    throw ContractError("cluster budget negative: " + std::to_string(d));
  }
  return std::max(d, 0.0);
}

double candidate_se(double budget, std::span<const double> post_powers, double h_failed,
                    double sigma2, double extra_floor) {
  return failed_se(post_powers, budget, h_failed, sigma2 + extra_floor);
}

std::vector<ClusterBudget> compute_budgets(const Scenario& sc, const PowerSolution& pre_outage,
                                           Mode mode) {
  if (pre_outage.per_bs.size() != sc.compensating.size()) {
    throw ContractError("compute_budgets: pre-outage solution does not match the scenario");
  }
  std::vector<ClusterBudget> out;
  const auto& prm = sc.params;
  for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
    const int bs_id = sc.compensating[i];
    const double floor = sc.extra_floor(bs_id, mode);
    for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
      const ClusterRef ref{bs_id, static_cast<int>(l)};
      const auto gains = sc.member_gains(ref);
      const auto& pre = pre_outage.per_bs[i].clusters.at(l).connected;
      ClusterBudget b;
      b.ref = ref;
      if (gains.empty()) {
        b.budget = 0.0;
      } else if (mode == Mode::isolated) {
        auto r = prop1_powers(gains, pre, prm.s_min, prm.sigma2.value, floor);
        b.delta = r.delta;
        b.post_powers = std::move(r.powers);
      } else {
        b.delta = std::numeric_limits<double>::quiet_NaN();
        b.post_powers = prop2_powers(gains, pre, prm.s_min, prm.sigma2.value, floor);
      }
      if (!gains.empty()) b.budget = budget_of(pre, b.post_powers);
      out.push_back(std::move(b));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ClusterBudget& a, const ClusterBudget& b) { return a.ref < b.ref; });
  return out;
}

CandidateTable candidate_table(const Scenario& sc, const std::vector<ClusterBudget>& budgets,
                               Mode mode) {
  CandidateTable t;
  t.users = sc.failed_users;
  for (const auto& b : budgets) t.clusters.push_back(b.ref);
  t.se.assign(t.users.size(), std::vector<double>(budgets.size(), 0.0));
  t.gain.assign(t.users.size(), std::vector<double>(budgets.size(), 0.0));
  for (std::size_t u = 0; u < t.users.size(); ++u) {
    for (std::size_t c = 0; c < budgets.size(); ++c) {
      const int bs_id = budgets[c].ref.bs_id;
      const double h = sc.gain(bs_id, t.users[u]);
      t.gain[u][c] = h;
      t.se[u][c] = candidate_se(budgets[c].budget, budgets[c].post_powers, h,
                                sc.params.sigma2.value, sc.extra_floor(bs_id, mode));
    }
  }
  return t;
}

AssociationMap greedy_associate(const CandidateTable& table) {
  const std::size_t nu = table.users.size();
  const std::size_t nc = table.clusters.size();
  if (nu > nc) {
    throw ContractError("greedy_associate: " + std::to_string(nu) + " failed users but only " +
                        std::to_string(nc) + " clusters");
  }
  struct Entry {
    double se;
    std::size_t c;
    std::size_t u;
  };
  std::vector<Entry> entries;
  entries.reserve(nu * nc);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t c = 0; c < nc; ++c) {
      if (table.se[u][c] > 0.0) entries.push_back({table.se[u][c], c, u});
    }
  }
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (a.se != b.se) return a.se > b.se;
    if (table.clusters[a.c] != table.clusters[b.c]) return table.clusters[a.c] < table.clusters[b.c];
    return table.users[a.u] < table.users[b.u];
  });

  AssociationMap out;
  std::vector<char> user_done(nu, 0), cluster_used(nc, 0);
  std::size_t assigned = 0;
  for (const auto& e : entries) {
    if (assigned == nu) break;
    if (user_done[e.u] || cluster_used[e.c]) continue;
    user_done[e.u] = cluster_used[e.c] = 1;
    out.entries[table.users[e.u]] = table.clusters[e.c];
    ++assigned;
  }
  if (assigned == nu) return out;

  std::vector<std::size_t> rest;
  for (std::size_t u = 0; u < nu; ++u) {
    if (!user_done[u]) rest.push_back(u);
  }
  auto best_gain = [&](std::size_t u) {
    double g = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      if (!cluster_used[c]) g = std::max(g, table.gain[u][c]);
    }
    return g;
  };
  std::vector<double> key(nu, 0.0);
  for (std::size_t u : rest) key[u] = best_gain(u);
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return table.users[a] < table.users[b];
  });
  for (std::size_t u : rest) {
    std::size_t pick = nc;
    for (std::size_t c = 0; c < nc; ++c) {
      if (cluster_used[c]) continue;
      if (pick == nc || table.gain[u][c] > table.gain[u][pick]) pick = c;
    }
    cluster_used[pick] = 1;
    out.entries[table.users[u]] = table.clusters[pick];
    out.fallback.insert(table.users[u]);
  }
  return out;
}

AssociationMap heuristic_association(const Scenario& sc, const PowerSolution& pre_outage,
                                     Mode mode) {
  return greedy_associate(candidate_table(sc, compute_budgets(sc, pre_outage, mode), mode));
}

}  // namespace noc
