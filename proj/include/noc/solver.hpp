#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "noc/barrier.hpp"
#include "noc/domain.hpp"

namespace noc {

enum class PaMode { pre_outage, compensation, compensation_interference };

std::string to_string(PaMode m);

/// One BS's power-allocation problem. Member gains may be listed in any
/// order; SIC order (gain descending, ties by position) is applied
/// internally and powers come back in input order.
struct PaInstance {
  int bs_id = 0;
  PaMode mode = PaMode::compensation;
  std::vector<std::vector<double>> member_gains;
  std::vector<std::optional<double>> failed_gain;
  /// Per-cluster total-power caps in mW (infinite = none).
  std::vector<double> caps;
  /// |D_n| * I_max, added to sigma2.
  double extra_floor = 0.0;
  SystemParams params;

  int variable_count() const;
  void validate() const;
};

PaInstance make_instance(const Scenario& sc, int bs_id, PaMode mode,
                         const AssociationMap* assoc = nullptr);

struct PaResult {
  barrier::Status status = barrier::Status::optimal;
  BsPowers powers;
  /// Sum of connected SE (pre-outage) or failed SE (compensation), bit/s/Hz.
  double objective = 0.0;
  /// Constraints binding at the phase-I optimum; set when infeasible.
  std::vector<std::string> certificate;
  double phase1_value = 0.0;
  int newton_iterations = 0;
  std::vector<barrier::TraceEntry> trace;

  bool ok() const { return status == barrier::Status::optimal; }
};

/// Variables are p / p_max; cluster l's connected members in SIC order come
/// first, then its failed user if any. Rows are unit-normalized.
barrier::Problem build_problem(const PaInstance& inst);

/// Objective evaluated with the SE formulas of the domain module.
double instance_objective(const PaInstance& inst, const BsPowers& powers);

/// Direct check of the instance's inequalities (same tolerance convention as
/// check_constraints). Empty means feasible.
std::vector<Violation> instance_violations(const PaInstance& inst, const BsPowers& powers,
                                           double tol = 1e-6);

PaResult solve_instance(const PaInstance& inst, const barrier::SolverConfig& cfg = {},
                        bool trace = false);

/// Per-scenario outcome: one PaResult per compensating BS (aligned with
/// Scenario::compensating) and the assembled solution when all succeed.
struct ScenarioSolve {
  bool feasible = true;
  PowerSolution solution;
  std::vector<PaResult> per_bs;
  /// First failing BS and its certificate, for reporting.
  std::string diagnostic;
};

ScenarioSolve solve_pre_outage(const Scenario& sc, const barrier::SolverConfig& cfg = {});

/// Problem 2 (isolated) or Problem 3 (interference) for every compensating
/// BS. BSs that serve no failed user keep `pre_outage` powers when given,
/// otherwise their pre-outage problem is solved.
ScenarioSolve solve_compensation(const Scenario& sc, const AssociationMap& assoc, Mode mode,
                                 const barrier::SolverConfig& cfg = {},
                                 const PowerSolution* pre_outage = nullptr);

struct OracleResult {
  bool feasible = false;
  BsPowers powers;
  double objective = -std::numeric_limits<double>::infinity();
  long long evaluated = 0;
};

/// Exhaustive search over [0, p_max]^k on a grid of absolute step `step`
/// (mW), k <= 3. For k = 3 a pass at 10 * step over the whole box is refined
/// at `step` within two coarse cells of the best coarse point.
OracleResult grid_oracle(const PaInstance& inst, double step, double tol = 1e-6);

}  // namespace noc
