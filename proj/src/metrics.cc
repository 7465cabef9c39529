#include "noc/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "noc/association.hpp"
#include "noc/channel.hpp"
#include "noc/solver.hpp"

namespace noc {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool serves_failed(const AssociationMap& assoc, int bs_id) {
  return std::any_of(assoc.entries.begin(), assoc.entries.end(),
                     [&](const auto& e) { return e.second.bs_id == bs_id; });
}

}  // namespace

double jain_fairness(std::span<const double> se, int total_users, bool* all_zero) {
  if (total_users < static_cast<int>(se.size()) || total_users <= 0) {
    throw ContractError("jain_fairness: total_users must cover every SE entry");
  }
  const double s = std::accumulate(se.begin(), se.end(), 0.0);
  const double s2 = std::inner_product(se.begin(), se.end(), se.begin(), 0.0);
  if (all_zero != nullptr) *all_zero = s2 == 0.0;
  if (s2 == 0.0) return 0.0;
  return s * s / (total_users * s2);
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::lc_noc: return "lc_noc";
    case Scheme::lc_noc_dnn: return "lc_noc_dnn";
    case Scheme::opt_noc: return "opt_noc";
    case Scheme::no_oc: return "no_oc";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "lc_noc") return Scheme::lc_noc;
  if (s == "lc_noc_dnn") return Scheme::lc_noc_dnn;
  if (s == "opt_noc") return Scheme::opt_noc;
  if (s == "no_oc") return Scheme::no_oc;
  throw ConfigError("unknown scheme '" + s + "' (expected lc_noc|lc_noc_dnn|opt_noc|no_oc)");
}

MetricsReport evaluate_scheme(const Scenario& sc, Scheme scheme, const EvalOptions& opt) {
  if (scheme == Scheme::lc_noc_dnn && opt.model == nullptr) {
    throw ConfigError("scheme lc_noc_dnn needs a model file");
  }
  MetricsReport rep;
  rep.scheme = scheme;
  rep.mode = opt.mode;
  rep.failed_users = static_cast<int>(sc.failed_users.size());

  auto t0 = Clock::now();
  const auto pre = solve_pre_outage(sc, opt.solver);
  const double t_pre = since(t0);
  if (!pre.feasible) {
    rep.feasible = false;
    rep.diagnostic = "pre-outage: " + pre.diagnostic;
    return rep;
  }

  switch (scheme) {
    case Scheme::no_oc:
      rep.solution = pre.solution;
      rep.seconds_power = t_pre;
      break;
    case Scheme::lc_noc: {
      t0 = Clock::now();
      rep.assoc = heuristic_association(sc, pre.solution, opt.mode);
      rep.seconds_association = since(t0);
      t0 = Clock::now();
      auto comp = solve_compensation(sc, rep.assoc, opt.mode, opt.solver, &pre.solution);
      rep.seconds_power = since(t0);
      if (!comp.feasible) {
        rep.feasible = false;
        rep.diagnostic = comp.diagnostic;
        return rep;
      }
      rep.solution = std::move(comp.solution);
      break;
    }
    case Scheme::lc_noc_dnn: {
      t0 = Clock::now();
      rep.assoc = heuristic_association(sc, pre.solution, opt.mode);
      rep.seconds_association = since(t0);
      t0 = Clock::now();
      const PaMode pa = opt.mode == Mode::interference ? PaMode::compensation_interference
                                                       : PaMode::compensation;
      for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
        const int bs_id = sc.compensating[i];
        if (serves_failed(rep.assoc, bs_id)) {
          const Eigen::MatrixXd P = opt.model->predict(build_input(sc, bs_id, rep.assoc));
          rep.solution.per_bs.push_back(powers_from_matrix(sc, bs_id, rep.assoc, P));
        } else if (opt.mode == Mode::isolated) {
          rep.solution.per_bs.push_back(pre.solution.per_bs[i]);
        } else {
          PaInstance inst = make_instance(sc, bs_id, pa, &rep.assoc);
          inst.mode = PaMode::pre_outage;
          auto r = solve_instance(inst, opt.solver);
          if (!r.ok()) {
            rep.feasible = false;
            rep.diagnostic = "bs " + std::to_string(bs_id) + " unserved-cell allocation failed";
            return rep;
          }
          rep.solution.per_bs.push_back(std::move(r.powers));
        }
      }
      rep.seconds_power = since(t0);
      break;
    }
    case Scheme::opt_noc: {
      t0 = Clock::now();
      auto best = opt_noc(sc, opt.mode, opt.solver, opt.budget, &pre.solution);
      rep.seconds_power = since(t0);
      if (!best.feasible) {
        rep.feasible = false;
        rep.diagnostic = "every association infeasible (" + std::to_string(best.infeasible) +
                         " of " + std::to_string(best.evaluated) + ")";
        return rep;
      }
      rep.assoc = std::move(best.assoc);
      rep.solution = std::move(best.solution);
      break;
    }
  }

  rep.solution.objective = failed_objective(sc, rep.assoc, rep.solution, opt.mode);
  rep.fallback_users = static_cast<int>(rep.assoc.fallback.size());
  const UserSe se = evaluate_se(sc, rep.assoc, rep.solution, opt.mode);
  double sum_c = 0.0, sum_f = 0.0;
  for (const auto& [u, v] : se.connected) {
    rep.all_se.push_back(v);
    sum_c += v;
    rep.c1_relative_error.push_back(std::max(0.0, sc.params.s_min - v) / sc.params.s_min);
  }
  for (const auto& [u, v] : se.failed) {
    rep.all_se.push_back(v);
    sum_f += v;
    if (v > 0.0) ++rep.served;
  }
  rep.total_users = static_cast<int>(rep.all_se.size());
  rep.avg_connected_se = se.connected.empty() ? 0.0 : sum_c / se.connected.size();
  rep.avg_failed_se = se.failed.empty() ? 0.0 : sum_f / se.failed.size();
  rep.avg_all_se = rep.total_users == 0 ? 0.0 : (sum_c + sum_f) / rep.total_users;
  rep.jain = rep.total_users == 0 ? 0.0 : jain_fairness(rep.all_se, rep.total_users);

  for (const auto& v : check_constraints(sc, rep.assoc, rep.solution, opt.mode).violations) {
    // Leaving failed users unassociated is what No_OC means.
    if (scheme == Scheme::no_oc && v.constraint == "C3") continue;
    ++rep.violations[v.constraint];
  }
  return rep;
}

std::vector<double> dnn_c1_errors(const SurrogateModel& model, const LabeledSample& s,
                                  double s_min, double noise) {
  const Eigen::MatrixXd P = model.predict(s.H);
  std::vector<double> out;
  for (int c = 0; c < s.L; ++c) {
    std::vector<std::pair<double, double>> gp;
    for (int r = 0; r < s.q; ++r) {
      if (!std::isnan(s.H(r, c))) gp.emplace_back(std::pow(10.0, s.H(r, c)), P(r, c));
    }
    std::stable_sort(gp.begin(), gp.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> g, p;
    for (const auto& [gain, power] : gp) {
      g.push_back(gain);
      p.push_back(power);
    }
    for (double v : connected_se(g, p, noise)) out.push_back(std::max(0.0, s_min - v) / s_min);
  }
  return out;
}

double Cdf::fraction_below(double threshold) const {
  if (x.empty()) return 0.0;
  const auto it = std::lower_bound(x.begin(), x.end(), threshold);
  return static_cast<double>(it - x.begin()) / static_cast<double>(x.size());
}

Cdf violation_cdf(std::vector<double> errors) {
  std::sort(errors.begin(), errors.end());
  Cdf c;
  c.x = std::move(errors);
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    c.F.push_back(static_cast<double>(k + 1) / static_cast<double>(c.x.size()));
  }
  return c;
}

std::vector<BenchRow> runtime_bench(const BenchConfig& cfg) {
  if (cfg.failed_sizes.empty() || cfg.repetitions < 1) {
    throw ConfigError("bench: need at least one size and one repetition");
  }
  const int q = SystemParams{}.cluster_size;
  auto users_for = [&](int f) {
    if (cfg.users_per_cell > 0) return cfg.users_per_cell;
    const int clusters = (2 * f + cfg.n_compensating - 1) / cfg.n_compensating;
    return clusters * q;
  };
  int l_max = 0;
  for (int f : cfg.failed_sizes) l_max = std::max(l_max, (users_for(f) + q - 1) / q);

  // Timing only needs the right shapes; weights are irrelevant.
  SurrogateModel timing_model;
  const SurrogateModel* model = cfg.model;
  if (model == nullptr) {
    timing_model.q = q;
    timing_model.l_max = l_max;
    const int d = timing_model.features();
    timing_model.net = Mlp::glorot({d, 200, 200, 200, d}, cfg.seed);
    timing_model.in_mean = Eigen::VectorXd::Zero(d);
    timing_model.in_std = Eigen::VectorXd::Ones(d);
    timing_model.out_mean = Eigen::VectorXd::Constant(d, -3.0);
    timing_model.out_std = Eigen::VectorXd::Ones(d);
    timing_model.p_max = SystemParams{}.p_max.value;
    model = &timing_model;
  }

  std::vector<BenchRow> rows;
  for (int f : cfg.failed_sizes) {
    TopologyConfig tc;
    tc.n_compensating = cfg.n_compensating;
    tc.users_per_cell = users_for(f);
    tc.n_failed = f;
    tc.cluster_size = q;
    tc.seed = cfg.seed;
    const Scenario sc = build_scenario(generate_topology(tc), SystemParams{});
    const auto pre = solve_pre_outage(sc);
    if (!pre.feasible) throw ConfigError("bench: pre-outage infeasible at U^f=" + std::to_string(f));

    BenchRow row;
    row.failed = f;
    row.clusters = sc.total_clusters();
    std::vector<double> t_assoc, t_dnn, t_solve;
    AssociationMap assoc;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      // Repeat enough times that each sample spans well over the clock tick.
      int inner = 0;
      auto t0 = Clock::now();
      do {
        assoc = heuristic_association(sc, pre.solution, Mode::isolated);
        ++inner;
      } while (since(t0) < 2e-3);
      t_assoc.push_back(since(t0) / inner);

      int bs_id = assoc.entries.begin()->second.bs_id;
      const Eigen::MatrixXd H = build_input(sc, bs_id, assoc);
      inner = 0;
      t0 = Clock::now();
      do {
        volatile double sink = model->predict(H)(0, 0);
        (void)sink;
        ++inner;
      } while (since(t0) < 2e-3);
      t_dnn.push_back(since(t0) / inner);

      t0 = Clock::now();
      solve_compensation(sc, assoc, Mode::isolated, {}, &pre.solution);
      t_solve.push_back(since(t0));
    }
    row.association_s = median(t_assoc);
    row.dnn_inference_s = median(t_dnn);
    row.convex_solve_s = median(t_solve);

    row.opt_associations = permutation_count(row.clusters, f);
    EnumerationBudget budget;
    budget.max_associations = cfg.opt_sample;
    const auto t0 = Clock::now();
    long long completed = 0;
    try {
      completed = opt_noc(sc, Mode::isolated, {}, budget, &pre.solution).evaluated;
    } catch (const BudgetExceeded& e) {
      completed = e.completed;
      row.opt_extrapolated = true;
    }
    const double el = since(t0);
    row.opt_per_association_s = completed > 0 ? el / completed : 0.0;
    row.opt_extrapolated_s = row.opt_extrapolated
                                 ? row.opt_per_association_s *
                                       std::exp(std::lgamma(row.clusters + 1.0) -
                                                std::lgamma(row.clusters - f + 1.0))
                                 : el;
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("loglog_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= x.size();
  my /= y.size();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    num += dx * (std::log(y[k]) - my);
    den += dx * dx;
  }
  return num / den;
}

}  // namespace noc
