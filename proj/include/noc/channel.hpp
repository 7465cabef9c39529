#pragma once

#include <cstdint>
#include <vector>

#include "noc/units.hpp"

namespace noc {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

/// 38 + 30 log10(d) dB. Throws ContractError for d <= 0.
double path_loss_db(double distance_m);

/// Distance-only gain 10^(-PL/10). `fading` is a multiplicative hook, 1 by default.
ChannelGain channel_gain(double distance_m, double fading = 1.0);

struct BaseStation {
  int id = 0;
  Position pos;
  bool failed = false;
};

struct UserEquipment {
  int id = 0;
  int home_bs = 0;
  Position pos;
};

/// Network snapshot. Ids are dense: bs[i].id == i, users[j].id == j.
struct Topology {
  std::vector<BaseStation> bs;
  std::vector<UserEquipment> users;
  /// gain[bs_id][user_id], linear.
  std::vector<std::vector<double>> gain;
  std::uint64_t seed = 0;
  /// Number of draws rejected because some compensating cell broke the
  /// connected-before-failed gain ordering.
  int resamples = 0;
};

struct TopologyConfig {
  int n_compensating = 3;
  int users_per_cell = 4;
  int n_failed = 3;
  int cluster_size = 2;
  std::uint64_t seed = 0;
  double cell_radius_m = 120.0;
  double min_distance_m = 20.0;
  /// Compensating BSs sit on a ring of radius ring_factor * cell_radius.
  double ring_factor = 2.0;
};

/// Failed BS (id 0) at the origin, compensating BSs 1..N on a ring, connected
/// users uniform in each compensating disk, failed users uniform in the
/// failed disk. Deterministic in `cfg.seed`.
Topology generate_topology(const TopologyConfig& cfg);

/// Uniform point in the annulus [r_min, r_max] around `center` by rejection
/// from the bounding square. Exposed for tests.
template <typename Rng>
Position sample_in_disk(Rng& rng, Position center, double r_min, double r_max);

/// True when every connected user of each compensating BS has a gain at
/// least as large as every failed user's gain towards that BS.
bool satisfies_gain_ordering(const Topology& topo);

}  // namespace noc

#include <random>

namespace noc {

template <typename Rng>
Position sample_in_disk(Rng& rng, Position center, double r_min, double r_max) {
  std::uniform_real_distribution<double> coord(-r_max, r_max);
  for (;;) {
    const double dx = coord(rng);
    const double dy = coord(rng);
    const double r2 = dx * dx + dy * dy;
    if (r2 >= r_min * r_min && r2 <= r_max * r_max) {
      return Position{center.x + dx, center.y + dy};
    }
  }
}

}  // namespace noc
