#include "noc/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace noc::barrier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

double term_sum(const LogTerm& term, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (int v : term.vars) s += x[v];
  return s;
}

double linear_dot(const Problem& p, const Eigen::VectorXd& x) {
  return p.linear.size() == 0 ? 0.0 : p.linear.dot(x);
}

/// phi(x + dx) - phi(x), evaluated as sums of log1p to avoid cancellation
/// when phi itself is large.
double barrier_delta(const Problem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& dx,
                     double t) {
  double df = linear_dot(p, dx);
  for (const auto& term : p.objective) {
    const double base = 1.0 + term.gain * term_sum(term, x);
    const double inc = term.gain * term_sum(term, dx);
    if (base + inc <= 0.0) return kInf;
    df += term.weight * std::log1p(inc / base) / kLn2;
  }
  double db = 0.0;
  for (const auto& c : p.constraints) {
    const double s = c.b - c.a.dot(x);
    const double ds = -c.a.dot(dx);
    if (!(s + ds > 0.0)) return kInf;
    db -= std::log1p(ds / s);
  }
  return -t * df + db;
}

struct NewtonSystem {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

NewtonSystem assemble(const Problem& p, const Eigen::VectorXd& x, double t) {
  NewtonSystem sys{-t * objective_gradient(p, x), -t * objective_hessian(p, x)};
  for (const auto& c : p.constraints) {
    const double s = c.b - c.a.dot(x);
    sys.grad += c.a / s;
    sys.hess.noalias() += (c.a / s) * (c.a / s).transpose();
  }
  return sys;
}

/// Newton direction with Jacobi equilibration; adds a growing multiple of the
/// identity to the scaled Hessian until it is positive definite (the objective
/// need not be concave).
Eigen::VectorXd newton_direction(const NewtonSystem& sys) {
  const Eigen::Index n = sys.grad.size();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = std::abs(sys.hess(i, i));
    d[i] = h > 0.0 ? 1.0 / std::sqrt(h) : 1.0;
  }
  const Eigen::MatrixXd scaled = d.asDiagonal() * sys.hess * d.asDiagonal();
  const Eigen::VectorXd rhs = -(d.asDiagonal() * sys.grad);
  double tau = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(scaled + tau * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd y = llt.solve(rhs);
      if (y.allFinite()) return d.asDiagonal() * y;
    }
    tau = tau == 0.0 ? 1e-10 : tau * 10.0;
  }
  return -(d.array().square() * sys.grad.array()).matrix();
}

struct CenterOutcome {
  bool exhausted = false;
};

/// Damped Newton on phi_t.
CenterOutcome center(const Problem& p, Eigen::VectorXd& x, double t, const SolverConfig& cfg,
                     int& iterations, int phase, int outer, std::vector<TraceEntry>* trace) {
  for (;;) {
    if (iterations >= cfg.max_iterations) return CenterOutcome{true};
    const NewtonSystem sys = assemble(p, x, t);
    Eigen::VectorXd dx = newton_direction(sys);
    double slope = sys.grad.dot(dx);
    if (!(slope < 0.0)) {
      dx = -sys.grad;
      slope = sys.grad.dot(dx);
    }
    const double decrement = -slope;
    if (decrement / 2.0 <= cfg.newton_tol) return {};

    double step = 1.0;
    double delta = barrier_delta(p, x, step * dx, t);
    while (!(delta <= cfg.armijo * step * slope) && step > 1e-16) {
      step *= cfg.shrink;
      delta = barrier_delta(p, x, step * dx, t);
    }
    ++iterations;
    if (!(delta <= 0.0) || !std::isfinite(delta)) return {};  // no representable progress
    const Eigen::VectorXd next = x + step * dx;
    if (next == x) return {};
    x = next;
    // Progress below the rounding level of phi: treat as centred.
    const bool stalled = -delta <= 1e-13 * (1.0 + t * std::abs(objective_value(p, x)));
    if (trace) {
      trace->push_back(TraceEntry{phase, outer, t, objective_value(p, x), decrement, step});
    }
    if (stalled) return {};
  }
}

}  // namespace

double objective_value(const Problem& p, const Eigen::VectorXd& x) {
  double f = linear_dot(p, x);
  for (const auto& term : p.objective) {
    f += term.weight * std::log1p(term.gain * term_sum(term, x)) / kLn2;
  }
  return f;
}

Eigen::VectorXd objective_gradient(const Problem& p, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = p.linear.size() == 0 ? Eigen::VectorXd::Zero(p.n) : p.linear;
  for (const auto& term : p.objective) {
    const double coef = term.weight * term.gain / (kLn2 * (1.0 + term.gain * term_sum(term, x)));
    for (int v : term.vars) g[v] += coef;
  }
  return g;
}

Eigen::MatrixXd objective_hessian(const Problem& p, const Eigen::VectorXd& x) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.n, p.n);
  for (const auto& term : p.objective) {
    const double den = 1.0 + term.gain * term_sum(term, x);
    const double coef = -term.weight * term.gain * term.gain / (kLn2 * den * den);
    for (int a : term.vars) {
      for (int b : term.vars) h(a, b) += coef;
    }
  }
  return h;
}

double barrier_value(const Problem& p, const Eigen::VectorXd& x, double t) {
  double phi = -t * objective_value(p, x);
  for (const auto& c : p.constraints) {
    const double s = c.b - c.a.dot(x);
    if (!(s > 0.0)) return kInf;
    phi -= std::log(s);
  }
  return phi;
}

Eigen::VectorXd barrier_gradient(const Problem& p, const Eigen::VectorXd& x, double t) {
  return assemble(p, x, t).grad;
}

void normalize_rows(Problem& p) {
  std::vector<LinearConstraint> kept;
  kept.reserve(p.constraints.size());
  for (auto& c : p.constraints) {
    const double norm = c.a.norm();
    if (norm == 0.0) {
      if (c.b < 0.0) kept.push_back(std::move(c));
      continue;
    }
    c.a /= norm;
    c.b /= norm;
    kept.push_back(std::move(c));
  }
  p.constraints = std::move(kept);
}

Result solve(const Problem& p, const SolverConfig& cfg, bool record_trace) {
  Result res;
  std::vector<TraceEntry>* trace = record_trace ? &res.trace : nullptr;
  const int n = p.n;
  const int m = static_cast<int>(p.constraints.size());

  // Phase I: minimize s subject to a.x - b <= s, s >= -1.
  Problem ph1;
  ph1.n = n + 1;
  ph1.linear = Eigen::VectorXd::Zero(n + 1);
  ph1.linear[n] = -1.0;
  Eigen::VectorXd z = Eigen::VectorXd::Constant(n + 1, n > 0 ? 0.5 / n : 0.0);
  double worst = -kInf;
  for (const auto& c : p.constraints) {
    Eigen::VectorXd a(n + 1);
    a << c.a, -1.0;
    ph1.constraints.push_back(LinearConstraint{a, c.b, c.label});
    worst = std::max(worst, c.a.dot(z.head(n)) - c.b);
  }
  {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n + 1);
    a[n] = -1.0;
    ph1.constraints.push_back(LinearConstraint{a, 1.0, "phase1-floor"});
  }
  z[n] = std::max(worst, -0.5) + 1.0;

  int iterations = 0;
  const double ph1_tol = std::min(cfg.outer_tol, 1e-12);
  double t = cfg.t0;
  bool strictly_feasible = false;
  auto interior = [&](const Eigen::VectorXd& zz) {
    if (zz[n] >= 0.0) return false;
    for (const auto& c : p.constraints) {
      if (!(c.b - c.a.dot(zz.head(n)) > 0.0)) return false;
    }
    return true;
  };
  for (int outer = 0;; ++outer) {
    const auto out = center(ph1, z, t, cfg, iterations, 1, outer, trace);
    if (interior(z)) {
      strictly_feasible = true;
      break;
    }
    if (out.exhausted) {
      res.status = Status::iteration_limit;
      res.x = z.head(n);
      res.newton_iterations = iterations;
      return res;
    }
    if (static_cast<double>(ph1.constraints.size()) / t < ph1_tol) break;
    t *= cfg.mu;
  }
  res.phase1_value = z[n];
  if (!strictly_feasible) {
    res.status = Status::infeasible;
    res.x = z.head(n);
    double lambda_total = 0.0;
    std::vector<double> lambda(p.constraints.size());
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      lambda[i] = 1.0 / (t * (ph1.constraints[i].b - ph1.constraints[i].a.dot(z)));
      lambda_total += lambda[i];
    }
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      if (lambda[i] > 1e-3 * lambda_total) res.binding.push_back(p.constraints[i].label);
    }
    res.newton_iterations = iterations;
    return res;
  }

  // Phase II.
  Eigen::VectorXd x = z.head(n);
  iterations = 0;
  t = cfg.t0;
  for (int outer = 0;; ++outer) {
    const auto out = center(p, x, t, cfg, iterations, 2, outer, trace);
    res.gap = m / t;
    if (out.exhausted) {
      res.status = Status::iteration_limit;
      break;
    }
    if (m == 0 || res.gap < cfg.outer_tol) {
      res.status = Status::optimal;
      break;
    }
    t *= cfg.mu;
  }
  res.x = x;
  res.objective = objective_value(p, x);
  res.newton_iterations = iterations;
  return res;
}

}  // namespace noc::barrier
