#include "noc/io.hpp"

#include <fstream>

namespace noc {

json to_json(const SystemParams& p) {
  return {{"p_max_mw", p.p_max.value},   {"p_tol_mw", p.p_tol.value},
          {"sigma2_mw", p.sigma2.value}, {"s_min", p.s_min},
          {"big_b", p.big_b},            {"i_max_mw", p.i_max.value},
          {"cluster_size", p.cluster_size}};
}

SystemParams params_from_json(const json& j) {
  SystemParams p;
  p.p_max.value = j.value("p_max_mw", p.p_max.value);
  p.p_tol.value = j.value("p_tol_mw", p.p_tol.value);
  p.sigma2.value = j.value("sigma2_mw", p.sigma2.value);
  p.s_min = j.value("s_min", p.s_min);
  p.big_b = j.value("big_b", p.big_b);
  p.i_max.value = j.value("i_max_mw", p.i_max.value);
  p.cluster_size = j.value("cluster_size", p.cluster_size);
  p.validate();
  return p;
}

json to_json(const Scenario& sc, SubchannelLayout layout) {
  const Topology& t = sc.topology;
  json bs = json::array();
  for (const auto& b : t.bs) {
    bs.push_back({{"id", b.id}, {"x", b.pos.x}, {"y", b.pos.y}, {"failed", b.failed}});
  }
  json users = json::array();
  for (const auto& u : t.users) {
    users.push_back({{"id", u.id}, {"home_bs", u.home_bs}, {"x", u.pos.x}, {"y", u.pos.y}});
  }
  return {{"seed", t.seed},
          {"resamples", t.resamples},
          {"bs", bs},
          {"user", users},
          {"gain", t.gain},
          {"params", to_json(sc.params)},
          {"layout", layout == SubchannelLayout::reuse ? "reuse" : "disjoint"}};
}

Scenario scenario_from_json(const json& j) {
  try {
    Topology t;
    t.seed = j.at("seed");
    t.resamples = j.value("resamples", 0);
    for (const auto& b : j.at("bs")) {
      t.bs.push_back(BaseStation{b.at("id"), Position{b.at("x"), b.at("y")}, b.at("failed")});
    }
    for (const auto& u : j.at("user")) {
      t.users.push_back(UserEquipment{u.at("id"), u.at("home_bs"), Position{u.at("x"), u.at("y")}});
    }
    t.gain = j.at("gain").get<std::vector<std::vector<double>>>();
    for (std::size_t k = 0; k < t.bs.size(); ++k) {
      if (t.bs[k].id != static_cast<int>(k)) throw ConfigError("scenario: bs ids must be dense");
    }
    for (std::size_t k = 0; k < t.users.size(); ++k) {
      if (t.users[k].id != static_cast<int>(k)) throw ConfigError("scenario: user ids must be dense");
    }
    if (t.gain.size() != t.bs.size()) throw ConfigError("scenario: gain rows must match bs count");
    for (const auto& row : t.gain) {
      if (row.size() != t.users.size()) throw ConfigError("scenario: gain columns must match users");
    }
    const auto layout = j.value("layout", std::string("disjoint")) == "reuse"
                            ? SubchannelLayout::reuse
                            : SubchannelLayout::disjoint;
    return build_scenario(std::move(t), params_from_json(j.at("params")), layout);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
}

json to_json(const AssociationMap& a) {
  json j = json::object();
  for (const auto& [u, ref] : a.entries) {
    j[std::to_string(u)] = {
        {"bs", ref.bs_id}, {"cluster", ref.cluster}, {"fallback", a.fallback.contains(u)}};
  }
  return j;
}

AssociationMap association_from_json(const json& j) {
  AssociationMap a;
  try {
    for (const auto& [key, v] : j.items()) {
      const int u = std::stoi(key);
      a.entries[u] = ClusterRef{v.at("bs"), v.at("cluster")};
      if (v.value("fallback", false)) a.fallback.insert(u);
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("association JSON: ") + e.what());
  }
  return a;
}

json to_json(const PowerSolution& s) {
  json per_bs = json::array();
  for (const auto& b : s.per_bs) {
    json clusters = json::array();
    for (const auto& c : b.clusters) {
      clusters.push_back({{"connected", c.connected},
                          {"failed", c.failed ? json(*c.failed) : json(nullptr)}});
    }
    per_bs.push_back({{"bs", b.bs_id}, {"clusters", clusters}});
  }
  return {{"objective", s.objective}, {"per_bs", per_bs}};
}

PowerSolution solution_from_json(const json& j) {
  PowerSolution s;
  try {
    s.objective = j.value("objective", 0.0);
    for (const auto& b : j.at("per_bs")) {
      BsPowers bp;
      bp.bs_id = b.at("bs");
      for (const auto& c : b.at("clusters")) {
        ClusterPowers cp;
        cp.connected = c.at("connected").get<std::vector<double>>();
        if (c.contains("failed") && !c.at("failed").is_null()) cp.failed = c.at("failed").get<double>();
        bp.clusters.push_back(std::move(cp));
      }
      s.per_bs.push_back(std::move(bp));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("power solution JSON: ") + e.what());
  }
  return s;
}

json to_json(const ViolationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"constraint", x.constraint}, {"entity", x.entity}, {"magnitude", x.magnitude}});
  }
  return {{"feasible", r.feasible()}, {"violations", v}};
}

json to_json(const MetricsReport& r) {
  const Cdf cdf = violation_cdf(r.c1_relative_error);
  return {{"scheme", to_string(r.scheme)},
          {"mode", to_string(r.mode)},
          {"feasible", r.feasible},
          {"diagnostic", r.diagnostic},
          {"total_users", r.total_users},
          {"failed_users", r.failed_users},
          {"served", r.served},
          {"avg_failed_se", r.avg_failed_se},
          {"avg_connected_se", r.avg_connected_se},
          {"avg_all_se", r.avg_all_se},
          {"jain", r.jain},
          {"fallback_users", r.fallback_users},
          {"violations", r.violations},
          {"c1_fraction_below_0.01", cdf.fraction_below(0.01)},
          {"seconds_association", r.seconds_association},
          {"seconds_power", r.seconds_power},
          {"association", to_json(r.assoc)},
          {"solution", to_json(r.solution)}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace noc
