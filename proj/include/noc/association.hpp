#pragma once

#include <span>
#include <vector>

#include "noc/domain.hpp"

namespace noc {

/// (sigma2 + extra_floor) / h_top * (2^s_min - 1).
double min_power_top_user(double h_top, double s_min, double sigma2, double extra_floor = 0.0);

struct Prop1Result {
  double delta = 1.0;
  std::vector<double> powers;
};

/// Uniform scaling of the pre-outage powers so the top user sits at its
/// minimum power. delta is clamped to [0, 1]. Gains and powers in SIC order.
Prop1Result prop1_powers(std::span<const double> gains, std::span<const double> pre_powers,
                         double s_min, double sigma2, double extra_floor = 0.0);

/// Rank-by-rank rescaling that keeps each lower-ranked user's SINR at its
/// pre-outage value. Top power is min(minimum power, pre-outage power).
std::vector<double> prop2_powers(std::span<const double> gains, std::span<const double> pre_powers,
                                 double s_min, double sigma2, double extra_floor = 0.0);

struct ClusterBudget {
  ClusterRef ref;
  /// Scale factor on the uniform path; NaN on the rank-by-rank path.
  double delta = 1.0;
  std::vector<double> post_powers;
  /// Power the cluster can offer a failed user, mW.
  double budget = 0.0;
};

/// sum(pre) - sum(post). Throws ContractError when negative beyond round-off.
double budget_of(std::span<const double> pre_powers, std::span<const double> post_powers);

/// failed_se with the budget as the failed user's power.
double candidate_se(double budget, std::span<const double> post_powers, double h_failed,
                    double sigma2, double extra_floor = 0.0);

/// Budgets for every cluster of every compensating BS: uniform scaling in
/// isolated mode, rank-by-rank with the interference floor otherwise.
std::vector<ClusterBudget> compute_budgets(const Scenario& sc, const PowerSolution& pre_outage,
                                           Mode mode);

/// se[u][c]: SE of failed user users[u] on clusters[c]; clusters sorted by
/// (bs, cluster). gain[u][c] is the user's gain towards that cluster's BS.
struct CandidateTable {
  std::vector<int> users;
  std::vector<ClusterRef> clusters;
  std::vector<std::vector<double>> se;
  std::vector<std::vector<double>> gain;
};

CandidateTable candidate_table(const Scenario& sc, const std::vector<ClusterBudget>& budgets,
                               Mode mode);

/// Repeated global argmax with row/column removal, implemented as one sort
/// of all entries. Ties go to the lowest (bs, cluster, user). Users left
/// when only zero entries remain are placed in descending order of their
/// best gain onto the free cluster of highest gain, and flagged.
AssociationMap greedy_associate(const CandidateTable& table);

/// Heuristic association end to end (budgets, table, greedy).
AssociationMap heuristic_association(const Scenario& sc, const PowerSolution& pre_outage,
                                     Mode mode);

}  // namespace noc
