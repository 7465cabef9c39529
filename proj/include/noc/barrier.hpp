#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace noc::barrier {

/// weight * log2(1 + gain * sum_{i in vars} x_i)
struct LogTerm {
  double weight = 1.0;
  double gain = 1.0;
  std::vector<int> vars;
};

/// a . x <= b
struct LinearConstraint {
  Eigen::VectorXd a;
  double b = 0.0;
  std::string label;
};

/// maximize sum(log terms) + linear . x  subject to  A x <= b.
struct Problem {
  int n = 0;
  std::vector<LogTerm> objective;
  Eigen::VectorXd linear;  // empty means zero
  std::vector<LinearConstraint> constraints;
};

struct SolverConfig {
  double mu = 10.0;
  double t0 = 1.0;
  double newton_tol = 1e-10;
  /// Stop once m / t falls below this.
  double outer_tol = 1e-8;
  int max_iterations = 500;
  double armijo = 0.25;
  double shrink = 0.5;
};

enum class Status { optimal, infeasible, iteration_limit };

struct TraceEntry {
  int phase = 2;  // 1 = feasibility, 2 = optimality
  int outer = 0;
  double t = 0.0;
  double objective = 0.0;
  double decrement = 0.0;
  double step = 0.0;
};

struct Result {
  Status status = Status::optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Final m / t.
  double gap = 0.0;
  int newton_iterations = 0;
  /// Phase-I optimum (max violation); > 0 means infeasible.
  double phase1_value = 0.0;
  /// Labels of the constraints active at the phase-I optimum (infeasible only).
  std::vector<std::string> binding;
  std::vector<TraceEntry> trace;
};

double objective_value(const Problem& p, const Eigen::VectorXd& x);
Eigen::VectorXd objective_gradient(const Problem& p, const Eigen::VectorXd& x);
Eigen::MatrixXd objective_hessian(const Problem& p, const Eigen::VectorXd& x);

/// -t f(x) - sum log(b - a.x); +inf outside the strict interior.
double barrier_value(const Problem& p, const Eigen::VectorXd& x, double t);
Eigen::VectorXd barrier_gradient(const Problem& p, const Eigen::VectorXd& x, double t);

/// Scales each row to unit norm. Rows with a == 0 are dropped when satisfied
/// and kept (as an infeasibility witness) otherwise.
void normalize_rows(Problem& p);

Result solve(const Problem& p, const SolverConfig& cfg = {}, bool record_trace = false);

}  // namespace noc::barrier
