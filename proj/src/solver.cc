#include "noc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace noc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Variable layout shared by the barrier problem, the checker and the oracle.
struct Layout {
  struct ClusterVars {
    std::vector<int> order;  // SIC rank -> input position
    std::vector<int> var;    // SIC rank -> variable index
    int failed_var = -1;
  };
  std::vector<ClusterVars> clusters;
  int n = 0;
};

bool has_failed_var(const PaInstance& inst, std::size_t l) {
  return inst.mode != PaMode::pre_outage && l < inst.failed_gain.size() &&
         inst.failed_gain[l].has_value();
}

Layout make_layout(const PaInstance& inst) {
  Layout lay;
  for (std::size_t l = 0; l < inst.member_gains.size(); ++l) {
    const auto& g = inst.member_gains[l];
    Layout::ClusterVars cv;
    cv.order.resize(g.size());
    std::iota(cv.order.begin(), cv.order.end(), 0);
    std::stable_sort(cv.order.begin(), cv.order.end(), [&](int a, int b) { return g[a] > g[b]; });
    for (std::size_t r = 0; r < g.size(); ++r) cv.var.push_back(lay.n++);
    if (has_failed_var(inst, l)) cv.failed_var = lay.n++;
    lay.clusters.push_back(std::move(cv));
  }
  return lay;
}

std::string entity(const PaInstance& inst, std::size_t l, const std::string& who) {
  return "bs " + std::to_string(inst.bs_id) + " cluster " + std::to_string(l) + " " + who;
}

double noise_of(const PaInstance& inst) { return inst.params.sigma2.value + inst.extra_floor; }

double sinr_target(const PaInstance& inst) { return std::exp2(inst.params.s_min) - 1.0; }

/// Flat power vector (mW) in layout order.
std::vector<double> flatten(const PaInstance& inst, const Layout& lay, const BsPowers& p) {
  if (p.clusters.size() != lay.clusters.size()) {
    throw ContractError("power vector does not match the instance");
  }
  std::vector<double> x(lay.n, 0.0);
  for (std::size_t l = 0; l < lay.clusters.size(); ++l) {
    const auto& cv = lay.clusters[l];
    if (p.clusters[l].connected.size() != cv.order.size()) {
      throw ContractError("power vector does not match the instance");
    }
    for (std::size_t r = 0; r < cv.order.size(); ++r) {
      x[cv.var[r]] = p.clusters[l].connected[cv.order[r]];
    }
    if (cv.failed_var >= 0) x[cv.failed_var] = p.clusters[l].failed.value_or(0.0);
  }
  (void)inst;
  return x;
}

BsPowers unflatten(const PaInstance& inst, const Layout& lay, const std::vector<double>& x) {
  BsPowers out;
  out.bs_id = inst.bs_id;
  for (std::size_t l = 0; l < lay.clusters.size(); ++l) {
    const auto& cv = lay.clusters[l];
    ClusterPowers cp;
    cp.connected.assign(cv.order.size(), 0.0);
    for (std::size_t r = 0; r < cv.order.size(); ++r) cp.connected[cv.order[r]] = x[cv.var[r]];
    if (has_failed_var(inst, l)) cp.failed = cv.failed_var >= 0 ? x[cv.failed_var] : 0.0;
    out.clusters.push_back(std::move(cp));
  }
  return out;
}

/// Objective and feasibility straight from the SE formulas, in mW.
struct PointEval {
  bool feasible = true;
  double objective = 0.0;
};

template <typename OnViolation>
PointEval evaluate_point(const PaInstance& inst, const Layout& lay, const std::vector<double>& x,
                         double tol, OnViolation&& on_violation) {
  PointEval ev;
  const auto& prm = inst.params;
  const double noise = noise_of(inst);
  double total = 0.0;
  std::vector<double> gains, powers;
  for (std::size_t l = 0; l < lay.clusters.size(); ++l) {
    const auto& cv = lay.clusters[l];
    gains.clear();
    powers.clear();
    for (std::size_t r = 0; r < cv.order.size(); ++r) {
      gains.push_back(inst.member_gains[l][cv.order[r]]);
      powers.push_back(x[cv.var[r]]);
    }
    const auto se = connected_se(gains, powers, noise);
    double before = 0.0;
    for (std::size_t r = 0; r < gains.size(); ++r) {
      auto who = [&] { return "member " + std::to_string(cv.order[r]); };
      const double shortfall = (prm.s_min - se[r]) / prm.s_min;
      if (shortfall > tol) {
        ev.feasible = false;
        on_violation("C1", entity(inst, l, who()), shortfall);
      }
      if (r > 0) {
        const double gap = (powers[r] - before) * h_minus(gains, r);
        if (prm.p_tol.value - gap > tol * prm.p_tol.value) {
          ev.feasible = false;
          on_violation("C5", entity(inst, l, who()), prm.p_tol.value - gap);
        }
      }
      if (powers[r] < -tol * prm.p_max.value) {
        ev.feasible = false;
        on_violation("C8", entity(inst, l, who()), -powers[r]);
      }
      before += powers[r];
    }
    if (inst.mode == PaMode::pre_outage) {
      for (double s : se) ev.objective += s;
    }
    double cluster_total = before;
    if (cv.failed_var >= 0) {
      const double pf = x[cv.failed_var];
      const double hf = *inst.failed_gain[l];
      if (!gains.empty()) {
        const double gap = (pf - before) * h_minus(gains, gains.size());
        if (prm.p_tol.value - gap > tol * prm.p_tol.value) {
          ev.feasible = false;
          on_violation("C4", entity(inst, l, "failed"), prm.p_tol.value - gap);
        }
      }
      if (pf < -tol * prm.p_max.value) {
        ev.feasible = false;
        on_violation("C7", entity(inst, l, "failed"), -pf);
      }
      ev.objective += failed_se(powers, std::max(pf, 0.0), hf, noise);
      cluster_total += pf;
    }
    if (l < inst.caps.size() && std::isfinite(inst.caps[l]) &&
        cluster_total - inst.caps[l] > tol * inst.caps[l]) {
      ev.feasible = false;
      on_violation("C10", entity(inst, l, "total"), cluster_total - inst.caps[l]);
    }
    total += cluster_total;
  }
  if (total - prm.p_max.value > tol * prm.p_max.value) {
    ev.feasible = false;
    on_violation("C6", "bs " + std::to_string(inst.bs_id), total - prm.p_max.value);
  }
  return ev;
}

}  // namespace

std::string to_string(PaMode m) {
  switch (m) {
    case PaMode::pre_outage: return "pre_outage";
    case PaMode::compensation: return "compensation";
    case PaMode::compensation_interference: return "compensation_interference";
  }
  return "?";
}

int PaInstance::variable_count() const { return make_layout(*this).n; }

void PaInstance::validate() const {
  params.validate();
  if (failed_gain.size() != member_gains.size() ||
      (!caps.empty() && caps.size() != member_gains.size())) {
    throw ContractError("PaInstance: per-cluster vectors disagree in length");
  }
  for (const auto& g : member_gains) {
    for (double v : g) {
      if (!(v > 0.0)) throw ContractError("PaInstance: gains must be positive");
    }
  }
  for (const auto& f : failed_gain) {
    if (f && !(*f > 0.0)) throw ContractError("PaInstance: gains must be positive");
  }
  if (extra_floor < 0.0) throw ContractError("PaInstance: negative interference floor");
}

PaInstance make_instance(const Scenario& sc, int bs_id, PaMode mode, const AssociationMap* assoc) {
  const int i = sc.bs_index(bs_id);
  if (assoc != nullptr) {
    for (const auto& [user, ref] : assoc->entries) sc.cluster(ref);
  }
  PaInstance inst;
  inst.bs_id = bs_id;
  inst.mode = mode;
  inst.params = sc.params;
  const Mode net = mode == PaMode::compensation_interference ? Mode::interference : Mode::isolated;
  for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
    const ClusterRef ref{bs_id, static_cast<int>(l)};
    inst.member_gains.push_back(sc.member_gains(ref));
    std::optional<double> fg;
    if (assoc != nullptr && mode != PaMode::pre_outage) {
      if (auto f = assoc->failed_user_of(ref)) fg = sc.gain(bs_id, *f);
    }
    inst.failed_gain.push_back(fg);
  }
  inst.caps = sc.cluster_power_caps(bs_id, net, assoc);
  inst.extra_floor = sc.extra_floor(bs_id, net);
  return inst;
}

barrier::Problem build_problem(const PaInstance& inst) {
  inst.validate();
  const Layout lay = make_layout(inst);
  const auto& prm = inst.params;
  const double pm = prm.p_max.value;
  const double noise = noise_of(inst);
  const double gamma = sinr_target(inst);

  barrier::Problem p;
  p.n = lay.n;
  auto row = [&]() { return Eigen::VectorXd::Zero(lay.n).eval(); };

  for (std::size_t l = 0; l < lay.clusters.size(); ++l) {
    const auto& cv = lay.clusters[l];
    std::vector<double> gains;
    for (int pos : cv.order) gains.push_back(inst.member_gains[l][pos]);
    std::vector<int> prefix;
    for (std::size_t r = 0; r < gains.size(); ++r) {
      auto who = [&] { return "member " + std::to_string(cv.order[r]); };
      const double g = gains[r] * pm / noise;

      // SINR >= gamma, linear in the powers.
      Eigen::VectorXd a = row();
      a[cv.var[r]] = -g;
      for (int v : prefix) a[v] = gamma * g;
      p.constraints.push_back({a, -gamma, "C1 " + entity(inst, l, who())});

      if (r > 0) {
        Eigen::VectorXd s = row();
        s[cv.var[r]] = -1.0;
        for (int v : prefix) s[v] = 1.0;
        p.constraints.push_back(
            {s, -prm.p_tol.value / (pm * h_minus(gains, r)), "C5 " + entity(inst, l, who())});
      }
      Eigen::VectorXd nn = row();
      nn[cv.var[r]] = -1.0;
      p.constraints.push_back({nn, 0.0, "C8 " + entity(inst, l, who())});

      if (inst.mode == PaMode::pre_outage) {
        auto with = prefix;
        with.push_back(cv.var[r]);
        p.objective.push_back({1.0, g, with});
        if (!prefix.empty()) p.objective.push_back({-1.0, g, prefix});
      }
      prefix.push_back(cv.var[r]);
    }

    std::vector<int> all = prefix;
    if (cv.failed_var >= 0) {
      const double gf = *inst.failed_gain[l] * pm / noise;
      if (!gains.empty()) {
        Eigen::VectorXd s = row();
        s[cv.failed_var] = -1.0;
        for (int v : prefix) s[v] = 1.0;
        p.constraints.push_back({s, -prm.p_tol.value / (pm * h_minus(gains, gains.size())),
                                 "C4 " + entity(inst, l, "failed")});
      }
      Eigen::VectorXd nn = row();
      nn[cv.failed_var] = -1.0;
      p.constraints.push_back({nn, 0.0, "C7 " + entity(inst, l, "failed")});
      all.push_back(cv.failed_var);
      p.objective.push_back({1.0, gf, all});
      if (!prefix.empty()) p.objective.push_back({-1.0, gf, prefix});
    }

    if (l < inst.caps.size() && std::isfinite(inst.caps[l]) && !all.empty()) {
      Eigen::VectorXd c = row();
      for (int v : all) c[v] = 1.0;
      p.constraints.push_back({c, inst.caps[l] / pm, "C10 " + entity(inst, l, "total")});
    }
  }
  if (lay.n > 0) {
    p.constraints.push_back(
        {Eigen::VectorXd::Ones(lay.n), 1.0, "C6 bs " + std::to_string(inst.bs_id)});
  }
  barrier::normalize_rows(p);
  return p;
}

double instance_objective(const PaInstance& inst, const BsPowers& powers) {
  const Layout lay = make_layout(inst);
  return evaluate_point(inst, lay, flatten(inst, lay, powers), kInf,
                        [](const char*, const std::string&, double) {})
      .objective;
}

std::vector<Violation> instance_violations(const PaInstance& inst, const BsPowers& powers,
                                           double tol) {
  const Layout lay = make_layout(inst);
  std::vector<Violation> out;
  evaluate_point(inst, lay, flatten(inst, lay, powers), tol,
                 [&](const char* c, const std::string& who, double m) {
                   out.push_back(Violation{c, who, m});
                 });
  return out;
}

PaResult solve_instance(const PaInstance& inst, const barrier::SolverConfig& cfg, bool trace) {
  const Layout lay = make_layout(inst);
  const barrier::Problem prob = build_problem(inst);
  const barrier::Result r = barrier::solve(prob, cfg, trace);

  PaResult out;
  out.status = r.status;
  out.phase1_value = r.phase1_value;
  out.newton_iterations = r.newton_iterations;
  out.trace = r.trace;
  out.certificate = r.binding;
  std::vector<double> x(lay.n, 0.0);
  for (int k = 0; k < lay.n; ++k) x[k] = r.x.size() == lay.n ? r.x[k] * inst.params.p_max.value : 0.0;
  out.powers = unflatten(inst, lay, x);
  out.objective = evaluate_point(inst, lay, x, kInf, [](const char*, const std::string&, double) {})
                      .objective;
  return out;
}

namespace {

bool bs_serves_failed(const Scenario& sc, const AssociationMap& assoc, int bs_id) {
  return std::any_of(assoc.entries.begin(), assoc.entries.end(),
                     [&](const auto& e) { return e.second.bs_id == bs_id; });
  (void)sc;
}

void record(ScenarioSolve& out, int bs_id, PaResult r) {
  if (!r.ok() && out.feasible) {
    out.feasible = false;
    out.diagnostic = "bs " + std::to_string(bs_id) +
                     (r.status == barrier::Status::infeasible ? " infeasible; binding:"
                                                              : " iteration limit reached");
    for (const auto& c : r.certificate) out.diagnostic += " [" + c + "]";
  }
  out.solution.per_bs.push_back(r.powers);
  out.per_bs.push_back(std::move(r));
}

}  // namespace

ScenarioSolve solve_pre_outage(const Scenario& sc, const barrier::SolverConfig& cfg) {
  ScenarioSolve out;
  for (int bs_id : sc.compensating) {
    record(out, bs_id, solve_instance(make_instance(sc, bs_id, PaMode::pre_outage), cfg));
  }
  out.solution.objective = 0.0;
  return out;
}

ScenarioSolve solve_compensation(const Scenario& sc, const AssociationMap& assoc, Mode mode,
                                 const barrier::SolverConfig& cfg,
                                 const PowerSolution* pre_outage) {
  ScenarioSolve out;
  const PaMode pa = mode == Mode::interference ? PaMode::compensation_interference
                                               : PaMode::compensation;
  for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
    const int bs_id = sc.compensating[i];
    if (bs_serves_failed(sc, assoc, bs_id)) {
      record(out, bs_id, solve_instance(make_instance(sc, bs_id, pa, &assoc), cfg));
      continue;
    }
    if (mode == Mode::isolated && pre_outage != nullptr) {
      PaResult kept;
      kept.powers = pre_outage->per_bs.at(i);
      record(out, bs_id, std::move(kept));
      continue;
    }
    // Unchanged service objective; in interference mode the floor and caps apply.
    PaInstance inst = make_instance(sc, bs_id, pa, &assoc);
    inst.mode = PaMode::pre_outage;
    record(out, bs_id, solve_instance(inst, cfg));
  }
  if (out.feasible) out.solution.objective = failed_objective(sc, assoc, out.solution, mode);
  return out;
}

OracleResult grid_oracle(const PaInstance& inst, double step, double tol) {
  inst.validate();
  const Layout lay = make_layout(inst);
  const int k = lay.n;
  if (k > 3) throw ContractError("grid_oracle: at most 3 free variables");
  if (!(step > 0.0)) throw ContractError("grid_oracle: step must be positive");
  const double pm = inst.params.p_max.value;
  auto none = [](const char*, const std::string&, double) {};

  OracleResult best;
  std::vector<double> x(k, 0.0);
  auto consider = [&]() {
    ++best.evaluated;
    const PointEval ev = evaluate_point(inst, lay, x, tol, none);
    if (ev.feasible && ev.objective > best.objective) {
      best.feasible = true;
      best.objective = ev.objective;
      best.powers = unflatten(inst, lay, x);
    }
  };
  // Visits lo[d] + i * h for i = 0..count[d] on every axis.
  auto sweep = [&](std::vector<double> lo, double h, std::vector<long long> count) {
    std::vector<long long> idx(k, 0);
    for (;;) {
      for (int d = 0; d < k; ++d) x[d] = std::min(pm, lo[d] + idx[d] * h);
      consider();
      int d = 0;
      while (d < k && ++idx[d] > count[d]) idx[d++] = 0;
      if (d == k) return;
    }
  };
  const long long fine = static_cast<long long>(std::floor(pm / step + 1e-9));

  if (k == 0) {
    consider();
    return best;
  }
  if (k <= 2) {
    sweep(std::vector<double>(k, 0.0), step, std::vector<long long>(k, fine));
    return best;
  }

  const double coarse = 10.0 * step;
  const long long ncoarse = static_cast<long long>(std::floor(pm / coarse + 1e-9));
  sweep(std::vector<double>(k, 0.0), coarse, std::vector<long long>(k, ncoarse));
  if (!best.feasible) {
    sweep(std::vector<double>(k, 0.0), step, std::vector<long long>(k, fine));
    return best;
  }
  const std::vector<double> centre = flatten(inst, lay, best.powers);
  std::vector<double> lo(k);
  std::vector<long long> count(k);
  for (int d = 0; d < k; ++d) {
    const long long c = std::llround(centre[d] / step);
    const long long first = std::max(0LL, c - 20);
    const long long last = std::min(fine, c + 20);
    lo[d] = first * step;
    count[d] = last - first;
  }
  sweep(lo, step, count);
  return best;
}

}  // namespace noc
