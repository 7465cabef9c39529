#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "noc/barrier.hpp"
#include "noc/domain.hpp"
#include "noc/optimal.hpp"
#include "noc/surrogate.hpp"

namespace noc {

/// (sum x)^2 / (total_users * sum x^2); users beyond se.size() count as zero.
/// All-zero input returns 0 and sets *all_zero.
double jain_fairness(std::span<const double> se, int total_users, bool* all_zero = nullptr);

enum class Scheme { lc_noc, lc_noc_dnn, opt_noc, no_oc };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct MetricsReport {
  Scheme scheme = Scheme::lc_noc;
  Mode mode = Mode::isolated;
  bool feasible = true;
  std::string diagnostic;
  int total_users = 0;
  int failed_users = 0;
  /// Failed users with positive SE.
  int served = 0;
  double avg_failed_se = 0.0;
  double avg_connected_se = 0.0;
  /// Connected and failed users pooled, unserved counted as zero.
  double avg_all_se = 0.0;
  double jain = 0.0;
  std::vector<double> all_se;
  /// (s_min - SE)+ / s_min per connected user.
  std::vector<double> c1_relative_error;
  std::map<std::string, int> violations;
  int fallback_users = 0;
  double seconds_association = 0.0;
  double seconds_power = 0.0;
  AssociationMap assoc;
  PowerSolution solution;
};

struct EvalOptions {
  Mode mode = Mode::isolated;
  barrier::SolverConfig solver;
  const SurrogateModel* model = nullptr;
  EnumerationBudget budget;
};

/// Runs one scheme on a scenario. BSs serving no failed user keep their
/// pre-outage allocation in every scheme.
MetricsReport evaluate_scheme(const Scenario& sc, Scheme scheme, const EvalOptions& opt);

/// Relative min-SE shortfall of each connected user under the model's
/// prediction for one sample (rows re-sorted by gain).
std::vector<double> dnn_c1_errors(const SurrogateModel& model, const LabeledSample& s,
                                  double s_min, double noise);

struct Cdf {
  std::vector<double> x;
  std::vector<double> F;
  double fraction_below(double threshold) const;
};

Cdf violation_cdf(std::vector<double> errors);

struct BenchConfig {
  std::vector<int> failed_sizes{4, 8, 12};
  int n_compensating = 3;
  /// Users per cell; 0 picks the smallest count giving 2 * U^f clusters.
  int users_per_cell = 0;
  int repetitions = 5;
  std::uint64_t seed = 1;
  /// OPT_NOC associations actually solved before extrapolating.
  long long opt_sample = 200;
  const SurrogateModel* model = nullptr;
};

struct BenchRow {
  int failed = 0;
  int clusters = 0;
  double association_s = 0.0;
  double dnn_inference_s = 0.0;
  double convex_solve_s = 0.0;
  /// P(L, U^f), saturating at the long long maximum.
  long long opt_associations = 0;
  double opt_per_association_s = 0.0;
  double opt_extrapolated_s = 0.0;
  bool opt_extrapolated = false;
};

std::vector<BenchRow> runtime_bench(const BenchConfig& cfg);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace noc
