#include "noc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace noc {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

double path_loss_db(double distance_m) {
  if (!(distance_m > 0.0)) {
    throw ContractError("path_loss_db: distance must be positive");
  }
  return 38.0 + 30.0 * std::log10(distance_m);
}

ChannelGain channel_gain(double distance_m, double fading) {
  return ChannelGain{fading * std::pow(10.0, -path_loss_db(distance_m) / 10.0)};
}

bool satisfies_gain_ordering(const Topology& topo) {
  for (const auto& bs : topo.bs) {
    if (bs.failed) continue;
    double min_connected = std::numeric_limits<double>::infinity();
    double max_failed = 0.0;
    for (const auto& ue : topo.users) {
      const double g = topo.gain[bs.id][ue.id];
      if (ue.home_bs == bs.id) {
        min_connected = std::min(min_connected, g);
      } else if (topo.bs[ue.home_bs].failed) {
        max_failed = std::max(max_failed, g);
      }
    }
    if (max_failed > min_connected) return false;
  }
  return true;
}

namespace {

Topology draw_topology(const TopologyConfig& cfg, std::mt19937_64& rng) {
  Topology topo;
  topo.seed = cfg.seed;
  topo.bs.push_back(BaseStation{0, Position{0.0, 0.0}, true});
  const double ring = cfg.ring_factor * cfg.cell_radius_m;
  for (int n = 0; n < cfg.n_compensating; ++n) {
    const double theta = 2.0 * std::numbers::pi * n / cfg.n_compensating;
    topo.bs.push_back(
        BaseStation{n + 1, Position{ring * std::cos(theta), ring * std::sin(theta)}, false});
  }

  int next_id = 0;
  for (int n = 1; n <= cfg.n_compensating; ++n) {
    for (int u = 0; u < cfg.users_per_cell; ++u) {
      topo.users.push_back(UserEquipment{
          next_id++, n,
          sample_in_disk(rng, topo.bs[n].pos, cfg.min_distance_m, cfg.cell_radius_m)});
    }
  }
  for (int u = 0; u < cfg.n_failed; ++u) {
    topo.users.push_back(UserEquipment{
        next_id++, 0, sample_in_disk(rng, topo.bs[0].pos, cfg.min_distance_m, cfg.cell_radius_m)});
  }

  topo.gain.assign(topo.bs.size(), std::vector<double>(topo.users.size(), 0.0));
  for (const auto& bs : topo.bs) {
    for (const auto& ue : topo.users) {
      topo.gain[bs.id][ue.id] = channel_gain(distance(bs.pos, ue.pos)).value;
    }
  }
  return topo;
}

}  // namespace

Topology generate_topology(const TopologyConfig& cfg) {
  if (cfg.n_compensating < 1 || cfg.users_per_cell < 1 || cfg.n_failed < 1 ||
      cfg.cluster_size < 1) {
    throw ConfigError("generate_topology: counts must be >= 1");
  }
  const int clusters_per_cell = (cfg.users_per_cell + cfg.cluster_size - 1) / cfg.cluster_size;
  if (cfg.n_failed > cfg.n_compensating * clusters_per_cell) {
    throw ConfigError("generate_topology: " + std::to_string(cfg.n_failed) +
                      " failed users exceed the " +
                      std::to_string(cfg.n_compensating * clusters_per_cell) +
                      " available clusters");
  }
  if (!(cfg.min_distance_m > 0.0) || cfg.min_distance_m >= cfg.cell_radius_m) {
    throw ConfigError("generate_topology: need 0 < min distance < cell radius");
  }

  std::mt19937_64 rng(cfg.seed);
  int resamples = 0;
  for (;;) {
    Topology topo = draw_topology(cfg, rng);
    if (satisfies_gain_ordering(topo)) {
      topo.resamples = resamples;
      return topo;
    }
    if (++resamples > 10000) {
      throw ConfigError("generate_topology: gain ordering never satisfied; check geometry");
    }
  }
}

}  // namespace noc
