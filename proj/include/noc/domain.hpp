#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "noc/channel.hpp"
#include "noc/units.hpp"

namespace noc {

/// Whether neighbouring cells share subchannels (co-channel variant) or not.
enum class Mode { isolated, interference };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct SystemParams {
  PowerMw p_max{dbm_to_linear(PowerDbm{46.02})};
  PowerMw p_tol{dbm_to_linear(PowerDbm{-101.4})};
  PowerMw sigma2{dbm_to_linear(PowerDbm{-150.0})};
  /// Minimum SE of every connected user, bit/s/Hz.
  double s_min = 4.0;
  /// Big-B relaxation constant. Zero means "derive from the scenario".
  double big_b = 0.0;
  /// Per-victim co-channel interference cap (interference mode only).
  PowerMw i_max{dbm_to_linear(PowerDbm{-120.0})};
  int cluster_size = 2;

  void validate() const;
};

/// Connected users of one BS sharing a resource, sorted by gain descending
/// (ties by user id).
struct Cluster {
  int bs_id = 0;
  std::vector<int> members;
  std::optional<int> failed_member;
};

struct ClusterRef {
  int bs_id = 0;
  int cluster = 0;
  auto operator<=>(const ClusterRef&) const = default;
};

/// Failed-user id -> serving (BS, cluster). `fallback` lists users placed by
/// the exhausted-candidate fill rather than by argmax.
struct AssociationMap {
  std::map<int, ClusterRef> entries;
  std::set<int> fallback;

  std::optional<int> failed_user_of(ClusterRef ref) const;
  /// C2 (at most one failed user per cluster).
  bool injective() const;
};

struct Scenario {
  Topology topology;
  SystemParams params;
  /// Ids of compensating BSs, in ascending order.
  std::vector<int> compensating;
  /// clusters[i] belongs to compensating[i].
  std::vector<std::vector<Cluster>> clusters;
  /// subchannel[i][l]: subchannel index used by cluster l of compensating[i].
  std::vector<std::vector<int>> subchannel;
  std::vector<int> failed_users;

  double gain(int bs_id, int user_id) const { return topology.gain[bs_id][user_id]; }
  int bs_index(int bs_id) const;
  const Cluster& cluster(ClusterRef ref) const;
  std::vector<double> member_gains(ClusterRef ref) const;
  int total_clusters() const;
  /// Number of other compensating BSs sharing at least one subchannel (|D_n|).
  int co_channel_neighbors(int bs_id) const;
  /// Additive floor |D_n| * I_max in interference mode, 0 otherwise.
  double extra_floor(int bs_id, Mode mode) const;
  /// Per-cluster total-power caps I_max / (max gain towards co-channel
  /// victims). Victims are connected members of co-channel clusters of other
  /// compensating BSs plus, when `assoc` is given, the failed users they
  /// serve. Infinity when no victim exists or in isolated mode.
  std::vector<double> cluster_power_caps(int bs_id, Mode mode,
                                         const AssociationMap* assoc = nullptr) const;
};

enum class SubchannelLayout {
  /// Every (BS, cluster) pair gets its own subchannel.
  disjoint,
  /// Cluster l of every BS reuses subchannel l.
  reuse,
};

/// Clusters each compensating BS, fills the subchannel map and derives big_B
/// when params.big_b == 0.
Scenario build_scenario(Topology topo, SystemParams params,
                        SubchannelLayout layout = SubchannelLayout::disjoint);

struct RankedUser {
  int id = 0;
  double gain = 0.0;
};

/// Sorts by gain descending (ties by id) and deals ranks round-robin over
/// L = ceil(|users| / q) clusters: cluster i gets ranks i, i+L, i+2L, ...
std::vector<std::vector<int>> sort_and_cluster(std::vector<RankedUser> users, int q);

/// Minimum gain among the members decoded before `rank` (0-based). For a
/// failed user pass rank == gains.size(). Throws for rank 0.
double h_minus(std::span<const double> gains, std::size_t rank);

/// Per-rank SE log2(1 + p_u h_u / (h_u * sum_{k<u} p_k + noise)), where
/// noise = sigma2 + extra floor.
std::vector<double> connected_se(std::span<const double> gains, std::span<const double> powers,
                                 double noise);

/// log2(1 + p_f h_f / (h_f * sum_k p_k + noise)).
double failed_se(std::span<const double> connected_powers, double p_failed, double h_failed,
                 double noise);

struct ClusterPowers {
  std::vector<double> connected;
  std::optional<double> failed;

  double total() const;
};

struct BsPowers {
  int bs_id = 0;
  std::vector<ClusterPowers> clusters;

  double total() const;
};

struct PowerSolution {
  /// Aligned with Scenario::compensating.
  std::vector<BsPowers> per_bs;
  /// Sum of failed-user SE, bit/s/Hz.
  double objective = 0.0;
};

struct Violation {
  std::string constraint;
  std::string entity;
  double magnitude = 0.0;
};

struct ViolationReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  std::size_t count(const std::string& constraint) const;
};

/// Checks C1-C8 (and the C10/C11 caps in interference mode). Magnitudes: C1
/// as relative SE shortfall, C4/C5 as received-power gap shortfall in mW, C6
/// as excess over p_max in mW, C7/C8 as negative power in mW, C10 as excess
/// interference in mW. An entry is reported when its magnitude exceeds `tol`
/// times the constraint's natural scale (1 for C1/C2/C3, p_tol for C4/C5,
/// p_max for C6-C8, I_max for C10).
ViolationReport check_constraints(const Scenario& sc, const AssociationMap& assoc,
                                  const PowerSolution& sol, Mode mode = Mode::isolated,
                                  double tol = 1e-6);

/// Per-user achieved SE (connected from `sol`, failed users served via
/// `assoc`, zero when unserved).
struct UserSe {
  std::map<int, double> connected;
  std::map<int, double> failed;
};

UserSe evaluate_se(const Scenario& sc, const AssociationMap& assoc, const PowerSolution& sol,
                   Mode mode = Mode::isolated);

/// Sum of failed-user SE.
double failed_objective(const Scenario& sc, const AssociationMap& assoc, const PowerSolution& sol,
                        Mode mode = Mode::isolated);

}  // namespace noc
