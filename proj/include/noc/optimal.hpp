#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "noc/barrier.hpp"
#include "noc/domain.hpp"

namespace noc {

struct EnumerationBudget {
  long long max_associations = std::numeric_limits<long long>::max();
  double max_seconds = std::numeric_limits<double>::infinity();
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, long long completed)
      : std::runtime_error(what), completed(completed) {}
  long long completed;
};

/// L! / (L - k)!, saturating at the long long maximum. Zero when k > L.
long long permutation_count(int L, int k);

/// Calls `visit` for every injective map of the failed users onto the
/// clusters, in lexicographic order (users in scenario order, clusters by
/// (bs, cluster)). Throws BudgetExceeded once the budget is spent.
void for_each_association(const Scenario& sc, const EnumerationBudget& budget,
                          const std::function<void(const AssociationMap&)>& visit);

std::vector<AssociationMap> enumerate_associations(const Scenario& sc,
                                                   const EnumerationBudget& budget = {});

struct OptResult {
  bool feasible = false;
  AssociationMap assoc;
  PowerSolution solution;
  double objective = -std::numeric_limits<double>::infinity();
  long long evaluated = 0;
  long long infeasible = 0;
  /// Distinct per-BS convex solves after memoization.
  long long distinct_solves = 0;
};

/// Exhaustive joint optimum. BSs serving no failed user keep `pre_outage`
/// powers (solved here when not given).
OptResult opt_noc(const Scenario& sc, Mode mode, const barrier::SolverConfig& cfg = {},
                  const EnumerationBudget& budget = {}, const PowerSolution* pre_outage = nullptr);

struct TableOptimum {
  /// assignment[u] = column index.
  std::vector<int> assignment;
  double value = 0.0;
  long long evaluated = 0;
};

/// Best injective row -> column assignment of a score table by enumeration.
TableOptimum optimal_table_assignment(const std::vector<std::vector<double>>& table);

}  // namespace noc
