#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "noc/barrier.hpp"
#include "noc/solver.hpp"

using namespace noc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SystemParams unit_params(double p_max, double s_min) {
  SystemParams p;
  p.p_max = PowerMw{p_max};
  p.sigma2 = PowerMw{1.0};
  p.p_tol = PowerMw{1e-12};
  p.s_min = s_min;
  return p;
}

PaInstance single_cluster(PaMode mode, std::vector<double> gains, std::optional<double> failed,
                          SystemParams params) {
  PaInstance inst;
  inst.mode = mode;
  inst.member_gains = {std::move(gains)};
  inst.failed_gain = {failed};
  inst.caps = {kInf};
  inst.params = params;
  return inst;
}

}  // namespace

TEST_CASE("one user saturates the budget") {
  const auto inst = single_cluster(PaMode::pre_outage, {1.0}, std::nullopt, unit_params(10, 1));
  const auto r = solve_instance(inst);
  REQUIRE(r.ok());
  CHECK(r.powers.clusters[0].connected[0] == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(std::log2(11.0)).epsilon(1e-7));

  const auto g = grid_oracle(inst, 1e-3);
  REQUIRE(g.feasible);
  CHECK(std::abs(g.powers.clusters[0].connected[0] - 10.0) <= 1e-3);
}

TEST_CASE("two-user cluster matches the grid oracle") {
  const auto inst = single_cluster(PaMode::pre_outage, {4.0, 1.0}, std::nullopt, unit_params(10, 0.5));
  const auto r = solve_instance(inst);
  REQUIRE(r.ok());
  const auto g = grid_oracle(inst, 1e-3);
  REQUIRE(g.feasible);
  for (int u = 0; u < 2; ++u) {
    CHECK(std::abs(r.powers.clusters[0].connected[u] - g.powers.clusters[0].connected[u]) <= 1e-3);
  }
  CHECK(r.objective >= g.objective - 1e-9);
  CHECK(instance_violations(inst, r.powers).empty());
}

TEST_CASE("compensation: connected user pinned at its minimum") {
  const auto inst = single_cluster(PaMode::compensation, {1.0}, 0.1, unit_params(20, 1));
  const auto r = solve_instance(inst);
  REQUIRE(r.ok());
  CHECK(r.powers.clusters[0].connected[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(*r.powers.clusters[0].failed == doctest::Approx(19.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(std::log2(1.0 + 1.9 / 1.1)).epsilon(1e-7));

  const auto g = grid_oracle(inst, 1e-2);
  REQUIRE(g.feasible);
  CHECK(std::abs(g.objective - r.objective) <= 2e-2);
}

TEST_CASE("compensation without a failed member has objective zero") {
  const auto inst = single_cluster(PaMode::compensation, {4.0, 1.0}, std::nullopt, unit_params(10, 0.5));
  const auto r = solve_instance(inst);
  REQUIRE(r.ok());
  CHECK(r.objective == 0.0);
  CHECK(instance_violations(inst, r.powers).empty());
}

TEST_CASE("unreachable s_min yields a certificate") {
  const auto inst = single_cluster(PaMode::pre_outage, {1.0}, std::nullopt, unit_params(10, 8));
  const auto r = solve_instance(inst);
  CHECK(r.status == barrier::Status::infeasible);
  CHECK_FALSE(r.certificate.empty());
  CHECK(r.phase1_value > 0.0);
  CHECK_FALSE(grid_oracle(inst, 1e-2).feasible);
}

TEST_CASE("a zero interference cap forces infeasibility") {
  auto inst = single_cluster(PaMode::compensation_interference, {1.0}, 0.1, unit_params(20, 1));
  inst.caps = {0.0};
  CHECK(solve_instance(inst).status == barrier::Status::infeasible);
}

TEST_CASE("a binding cap matches the grid oracle") {
  auto inst = single_cluster(PaMode::compensation_interference, {1.0}, 0.1, unit_params(20, 1));
  inst.caps = {6.0};
  inst.extra_floor = 0.5;
  const auto r = solve_instance(inst);
  REQUIRE(r.ok());
  CHECK(r.powers.clusters[0].total() == doctest::Approx(6.0).epsilon(1e-6));
  const auto g = grid_oracle(inst, 1e-2);
  REQUIRE(g.feasible);
  CHECK(std::abs(g.objective - r.objective) <= 2e-2);
}

TEST_CASE("oracle rejects more than three variables") {
  PaInstance inst;
  inst.mode = PaMode::pre_outage;
  inst.member_gains = {{4.0, 1.0}, {3.0, 2.0}};
  inst.failed_gain = {std::nullopt, std::nullopt};
  inst.caps = {kInf, kInf};
  inst.params = unit_params(10, 0.5);
  CHECK_THROWS_AS(grid_oracle(inst, 1e-2), ContractError);
}

TEST_CASE("pre-outage objective is concave between feasible points") {
  PaInstance inst;
  inst.mode = PaMode::pre_outage;
  inst.member_gains = {{5.0, 2.0}, {3.0, 1.5}};
  inst.failed_gain = {std::nullopt, std::nullopt};
  inst.caps = {kInf, kInf};
  inst.params = unit_params(10, 0.1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  auto draw = [&] {
    for (;;) {
      BsPowers p;
      p.clusters.resize(2);
      for (auto& c : p.clusters) c.connected = {U(rng), U(rng)};
      if (instance_violations(inst, p).empty()) return p;
    }
  };
  for (int k = 0; k < 100; ++k) {
    const BsPowers x = draw(), y = draw();
    for (double lam : {0.25, 0.5, 0.75}) {
      BsPowers z = x;
      for (int l = 0; l < 2; ++l) {
        for (int u = 0; u < 2; ++u) {
          z.clusters[l].connected[u] =
              lam * x.clusters[l].connected[u] + (1 - lam) * y.clusters[l].connected[u];
        }
      }
      CHECK(instance_objective(inst, z) >=
            lam * instance_objective(inst, x) + (1 - lam) * instance_objective(inst, y) - 1e-9);
    }
  }
}

TEST_CASE("barrier and objective gradients match central differences") {
  PaInstance inst;
  inst.mode = PaMode::compensation;
  inst.member_gains = {{5.0, 2.0}, {3.0, 1.5}};
  inst.failed_gain = {0.5, 0.8};
  inst.caps = {kInf, kInf};
  inst.params = unit_params(10, 0.5);
  const auto prob = build_problem(inst);
  barrier::SolverConfig loose;
  loose.outer_tol = 1.0;
  const auto r = barrier::solve(prob, loose);
  REQUIRE(r.status == barrier::Status::optimal);
  const Eigen::VectorXd x = r.x;
  for (double t : {1.0, 10.0}) {
    const Eigen::VectorXd g = barrier::barrier_gradient(prob, x, t);
    const Eigen::VectorXd go = barrier::objective_gradient(prob, x);
    for (int i = 0; i < prob.n; ++i) {
      const double h = 1e-6 * std::max(1e-3, std::abs(x(i)));
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (barrier::barrier_value(prob, xp, t) - barrier::barrier_value(prob, xm, t)) / (2 * h);
      CHECK(std::abs(fd - g(i)) <= 1e-5 * std::max(1.0, std::abs(g(i))));
      const double fo = (barrier::objective_value(prob, xp) - barrier::objective_value(prob, xm)) / (2 * h);
      CHECK(std::abs(fo - go(i)) <= 1e-5 * std::max(1.0, std::abs(go(i))));
    }
  }
}

TEST_CASE("solver output is equivariant to member and cluster order") {
  PaInstance a;
  a.mode = PaMode::compensation;
  a.member_gains = {{5.0, 2.0}, {3.0, 1.5}};
  a.failed_gain = {0.5, 0.8};
  a.caps = {kInf, kInf};
  a.params = unit_params(10, 0.5);
  PaInstance b = a;
  b.member_gains = {{1.5, 3.0}, {2.0, 5.0}};
  b.failed_gain = {0.8, 0.5};
  const auto ra = solve_instance(a);
  const auto rb = solve_instance(b);
  REQUIRE(ra.ok());
  REQUIRE(rb.ok());
  CHECK(std::abs(ra.objective - rb.objective) < 1e-6);
  CHECK(ra.powers.clusters[0].connected[0] == doctest::Approx(rb.powers.clusters[1].connected[1]).epsilon(1e-6));
  CHECK(ra.powers.clusters[0].connected[1] == doctest::Approx(rb.powers.clusters[1].connected[0]).epsilon(1e-6));
  CHECK(*ra.powers.clusters[1].failed == doctest::Approx(*rb.powers.clusters[0].failed).epsilon(1e-6));
}

TEST_CASE("scenario-level solves are feasible and audited") {
  TopologyConfig tc;
  tc.n_compensating = 3;
  tc.users_per_cell = 4;
  tc.n_failed = 3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    tc.seed = seed;
    const Scenario sc = build_scenario(generate_topology(tc), SystemParams{});
    const auto pre = solve_pre_outage(sc);
    REQUIRE(pre.feasible);
    const auto rep = check_constraints(sc, AssociationMap{}, pre.solution);
    CHECK(rep.violations.size() == rep.count("C3"));
    CHECK(rep.count("C3") == sc.failed_users.size());
    AssociationMap assoc;
    int l = 0;
    for (int u : sc.failed_users) assoc.entries[u] = ClusterRef{sc.compensating[l++ % 3], 0};
    const auto comp = solve_compensation(sc, assoc, Mode::isolated, {}, &pre.solution);
    REQUIRE(comp.feasible);
    CHECK(check_constraints(sc, assoc, comp.solution).feasible());
    CHECK(comp.solution.objective > 0.0);
  }
}

TEST_CASE("interference mode with no shared subchannel equals isolated mode") {
  TopologyConfig tc;
  tc.seed = 11;
  SystemParams p;
  p.i_max = PowerMw{1e6};
  const Scenario sc = build_scenario(generate_topology(tc), p, SubchannelLayout::disjoint);
  const auto pre = solve_pre_outage(sc);
  REQUIRE(pre.feasible);
  AssociationMap assoc;
  int l = 0;
  for (int u : sc.failed_users) assoc.entries[u] = ClusterRef{sc.compensating[l++ % 3], 1};
  const auto a = solve_compensation(sc, assoc, Mode::isolated, {}, &pre.solution);
  const auto b = solve_compensation(sc, assoc, Mode::interference, {}, &pre.solution);
  REQUIRE(a.feasible);
  REQUIRE(b.feasible);
  CHECK(std::abs(a.solution.objective - b.solution.objective) < 1e-6);
}
