#include "noc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace noc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string cluster_name(int bs_id, int cluster) {
  return "bs " + std::to_string(bs_id) + " cluster " + std::to_string(cluster);
}
}  // namespace

std::string to_string(Mode m) { return m == Mode::isolated ? "isolated" : "interference"; }

Mode mode_from_string(const std::string& s) {
  if (s == "isolated") return Mode::isolated;
  if (s == "interference") return Mode::interference;
  throw ConfigError("unknown mode '" + s + "' (expected isolated|interference)");
}

void SystemParams::validate() const {
  if (!(p_max.value > 0 && p_tol.value > 0 && sigma2.value > 0 && s_min > 0 &&
        i_max.value >= 0 && big_b >= 0)) {
    throw ConfigError("SystemParams: powers, s_min must be positive");
  }
  if (cluster_size < 1) throw ConfigError("SystemParams: cluster size must be >= 1");
}

std::optional<int> AssociationMap::failed_user_of(ClusterRef ref) const {
  for (const auto& [user, r] : entries) {
    if (r == ref) return user;
  }
  return std::nullopt;
}

bool AssociationMap::injective() const {
  std::set<ClusterRef> seen;
  for (const auto& [user, r] : entries) {
    if (!seen.insert(r).second) return false;
  }
  return true;
}

int Scenario::bs_index(int bs_id) const {
  const auto it = std::find(compensating.begin(), compensating.end(), bs_id);
  if (it == compensating.end()) {
    throw ContractError("bs " + std::to_string(bs_id) + " is not a compensating BS");
  }
  return static_cast<int>(it - compensating.begin());
}

const Cluster& Scenario::cluster(ClusterRef ref) const {
  const auto& cl = clusters.at(bs_index(ref.bs_id));
  if (ref.cluster < 0 || ref.cluster >= static_cast<int>(cl.size())) {
    throw ContractError("unknown cluster " + cluster_name(ref.bs_id, ref.cluster));
  }
  return cl[ref.cluster];
}

std::vector<double> Scenario::member_gains(ClusterRef ref) const {
  const Cluster& c = cluster(ref);
  std::vector<double> g;
  g.reserve(c.members.size());
  for (int u : c.members) g.push_back(gain(ref.bs_id, u));
  return g;
}

int Scenario::total_clusters() const {
  int total = 0;
  for (const auto& cl : clusters) total += static_cast<int>(cl.size());
  return total;
}

int Scenario::co_channel_neighbors(int bs_id) const {
  const int i = bs_index(bs_id);
  int count = 0;
  for (std::size_t j = 0; j < compensating.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    const bool shares = std::any_of(subchannel[i].begin(), subchannel[i].end(), [&](int b) {
      return std::find(subchannel[j].begin(), subchannel[j].end(), b) != subchannel[j].end();
    });
    if (shares) ++count;
  }
  return count;
}

double Scenario::extra_floor(int bs_id, Mode mode) const {
  if (mode == Mode::isolated) return 0.0;
  return co_channel_neighbors(bs_id) * params.i_max.value;
}

std::vector<double> Scenario::cluster_power_caps(int bs_id, Mode mode,
                                                 const AssociationMap* assoc) const {
  const int i = bs_index(bs_id);
  std::vector<double> caps(clusters[i].size(), kInf);
  if (mode == Mode::isolated) return caps;
  for (std::size_t l = 0; l < clusters[i].size(); ++l) {
    double worst = 0.0;
    for (std::size_t j = 0; j < compensating.size(); ++j) {
      if (j == static_cast<std::size_t>(i)) continue;
      for (std::size_t lp = 0; lp < clusters[j].size(); ++lp) {
        if (subchannel[j][lp] != subchannel[i][l]) continue;
        for (int v : clusters[j][lp].members) worst = std::max(worst, gain(bs_id, v));
        if (assoc != nullptr) {
          if (auto f = assoc->failed_user_of(ClusterRef{compensating[j], static_cast<int>(lp)})) {
            worst = std::max(worst, gain(bs_id, *f));
          }
        }
      }
    }
    if (worst > 0.0) caps[l] = params.i_max.value / worst;
  }
  return caps;
}

std::vector<std::vector<int>> sort_and_cluster(std::vector<RankedUser> users, int q) {
  if (q <= 0) throw ConfigError("sort_and_cluster: cluster size must be positive");
  std::sort(users.begin(), users.end(), [](const RankedUser& a, const RankedUser& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.id < b.id;
  });
  const std::size_t n = users.size();
  const std::size_t n_clusters = (n + q - 1) / q;
  std::vector<std::vector<int>> out(n_clusters);
  for (std::size_t r = 0; r < n; ++r) out[r % n_clusters].push_back(users[r].id);
  return out;
}

Scenario build_scenario(Topology topo, SystemParams params, SubchannelLayout layout) {
  params.validate();
  Scenario sc;
  sc.topology = std::move(topo);
  const Topology& t = sc.topology;
  for (const auto& bs : t.bs) {
    if (!bs.failed) sc.compensating.push_back(bs.id);
  }
  for (const auto& ue : t.users) {
    if (t.bs[ue.home_bs].failed) sc.failed_users.push_back(ue.id);
  }

  int next_subchannel = 0;
  for (int bs_id : sc.compensating) {
    std::vector<RankedUser> own;
    for (const auto& ue : t.users) {
      if (ue.home_bs == bs_id) own.push_back(RankedUser{ue.id, t.gain[bs_id][ue.id]});
    }
    std::vector<Cluster> cl;
    std::vector<int> sub;
    int l = 0;
    for (auto& members : sort_and_cluster(std::move(own), params.cluster_size)) {
      cl.push_back(Cluster{bs_id, std::move(members), std::nullopt});
      sub.push_back(layout == SubchannelLayout::reuse ? l : next_subchannel++);
      ++l;
    }
    sc.clusters.push_back(std::move(cl));
    sc.subchannel.push_back(std::move(sub));
  }

  sc.params = params;
  if (sc.params.big_b == 0.0) {
    double g_max = 0.0;
    double g_min = kInf;
    for (int bs_id : sc.compensating) {
      for (const auto& ue : t.users) {
        const double g = t.gain[bs_id][ue.id];
        g_max = std::max(g_max, g);
        g_min = std::min(g_min, g);
      }
    }
    sc.params.big_b = 10.0 * params.p_max.value * (g_max / g_min);
  }
  return sc;
}

double h_minus(std::span<const double> gains, std::size_t rank) {
  if (rank == 0) throw ContractError("h_minus: undefined for the rank-1 user");
  if (rank > gains.size()) throw ContractError("h_minus: rank out of range");
  return *std::min_element(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(rank));
}

std::vector<double> connected_se(std::span<const double> gains, std::span<const double> powers,
                                 double noise) {
  std::vector<double> se(gains.size());
  double before = 0.0;
  for (std::size_t u = 0; u < gains.size(); ++u) {
    se[u] = std::log2(1.0 + powers[u] * gains[u] / (gains[u] * before + noise));
    before += powers[u];
  }
  return se;
}

double failed_se(std::span<const double> connected_powers, double p_failed, double h_failed,
                 double noise) {
  const double interference = std::accumulate(connected_powers.begin(), connected_powers.end(), 0.0);
  return std::log2(1.0 + p_failed * h_failed / (h_failed * interference + noise));
}

double ClusterPowers::total() const {
  return std::accumulate(connected.begin(), connected.end(), failed.value_or(0.0));
}

double BsPowers::total() const {
  double t = 0.0;
  for (const auto& c : clusters) t += c.total();
  return t;
}

std::size_t ViolationReport::count(const std::string& constraint) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(),
      [&](const Violation& v) { return v.constraint == constraint; }));
}

namespace {

const BsPowers& powers_for(const Scenario& sc, const PowerSolution& sol, std::size_t i) {
  if (sol.per_bs.size() != sc.compensating.size() || sol.per_bs[i].bs_id != sc.compensating[i] ||
      sol.per_bs[i].clusters.size() != sc.clusters[i].size()) {
    throw ContractError("power solution dimensions do not match the scenario");
  }
  for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
    if (sol.per_bs[i].clusters[l].connected.size() != sc.clusters[i][l].members.size()) {
      throw ContractError("power solution dimensions do not match the scenario");
    }
  }
  return sol.per_bs[i];
}

}  // namespace

ViolationReport check_constraints(const Scenario& sc, const AssociationMap& assoc,
                                  const PowerSolution& sol, Mode mode, double tol) {
  ViolationReport rep;
  const SystemParams& p = sc.params;
  auto add = [&](const char* c, std::string entity, double magnitude) {
    rep.violations.push_back(Violation{c, std::move(entity), magnitude});
  };

  // C2 / C3 on the association itself.
  std::map<ClusterRef, int> load;
  for (const auto& [user, ref] : assoc.entries) {
    sc.cluster(ref);
    ++load[ref];
  }
  for (const auto& [ref, n] : load) {
    if (n > 1) add("C2", cluster_name(ref.bs_id, ref.cluster), n - 1);
  }
  for (int f : sc.failed_users) {
    if (!assoc.entries.contains(f)) add("C3", "user " + std::to_string(f), 1.0);
  }

  for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
    const int bs_id = sc.compensating[i];
    const BsPowers& bp = powers_for(sc, sol, i);
    const double noise = p.sigma2.value + sc.extra_floor(bs_id, mode);
    const auto caps = sc.cluster_power_caps(bs_id, mode, &assoc);
    double bs_total = 0.0;

    for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
      const ClusterRef ref{bs_id, static_cast<int>(l)};
      const auto gains = sc.member_gains(ref);
      const auto& pc = bp.clusters[l].connected;
      const auto& members = sc.clusters[i][l].members;
      const auto se = connected_se(gains, pc, noise);
      double before = 0.0;
      for (std::size_t u = 0; u < gains.size(); ++u) {
        const std::string who = "user " + std::to_string(members[u]);
        const double short_se = (p.s_min - se[u]) / p.s_min;
        if (short_se > tol) add("C1", who, short_se);
        if (u > 0) {
          const double gap = (pc[u] - before) * h_minus(gains, u);
          if (p.p_tol.value - gap > tol * p.p_tol.value) add("C5", who, p.p_tol.value - gap);
        }
        if (pc[u] < -tol * p.p_max.value) add("C8", who, -pc[u]);
        before += pc[u];
        bs_total += pc[u];
      }

      const auto served = assoc.failed_user_of(ref);
      const double h_min = gains.empty() ? 0.0 : h_minus(gains, gains.size());
      if (served) {
        const double pf = bp.clusters[l].failed.value_or(0.0);
        const std::string who = "user " + std::to_string(*served);
        const double gap = (pf - before) * h_min;
        if (!gains.empty() && p.p_tol.value - gap > tol * p.p_tol.value) {
          add("C4", who, p.p_tol.value - gap);
        }
        if (pf < -tol * p.p_max.value) add("C7", who, -pf);
        bs_total += pf;
      } else {
        const double shortfall = p.p_tol.value - p.big_b + before * h_min;
        if (shortfall > tol * p.p_tol.value) add("C4", cluster_name(bs_id, l), shortfall);
      }

      if (mode == Mode::interference && std::isfinite(caps[l])) {
        const double worst_gain = p.i_max.value / caps[l];
        const double total = before + (served ? bp.clusters[l].failed.value_or(0.0) : 0.0);
        const double excess = total * worst_gain - p.i_max.value;
        if (excess > tol * p.i_max.value) add("C10", cluster_name(bs_id, l), excess);
      }
    }
    const double excess = bs_total - p.p_max.value;
    if (excess > tol * p.p_max.value) add("C6", "bs " + std::to_string(bs_id), excess);
  }
  return rep;
}

UserSe evaluate_se(const Scenario& sc, const AssociationMap& assoc, const PowerSolution& sol,
                   Mode mode) {
  UserSe out;
  for (int f : sc.failed_users) out.failed[f] = 0.0;
  for (std::size_t i = 0; i < sc.compensating.size(); ++i) {
    const int bs_id = sc.compensating[i];
    const BsPowers& bp = powers_for(sc, sol, i);
    const double noise = sc.params.sigma2.value + sc.extra_floor(bs_id, mode);
    for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
      const ClusterRef ref{bs_id, static_cast<int>(l)};
      const auto gains = sc.member_gains(ref);
      const auto& pc = bp.clusters[l].connected;
      const auto se = connected_se(gains, pc, noise);
      for (std::size_t u = 0; u < gains.size(); ++u) {
        out.connected[sc.clusters[i][l].members[u]] = se[u];
      }
      if (auto f = assoc.failed_user_of(ref)) {
        const double pf = bp.clusters[l].failed.value_or(0.0);
        out.failed[*f] = failed_se(pc, std::max(pf, 0.0), sc.gain(bs_id, *f), noise);
      }
    }
  }
  return out;
}

double failed_objective(const Scenario& sc, const AssociationMap& assoc, const PowerSolution& sol,
                        Mode mode) {
  double total = 0.0;
  for (const auto& [user, se] : evaluate_se(sc, assoc, sol, mode).failed) total += se;
  return total;
}

}  // namespace noc
