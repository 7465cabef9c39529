#pragma once

#include <string>

#include "json.hpp"
#include "noc/domain.hpp"
#include "noc/metrics.hpp"

namespace noc {

using nlohmann::json;

json to_json(const SystemParams& p);
SystemParams params_from_json(const json& j);

/// Topology, params and subchannel layout; clusters are rebuilt on load.
json to_json(const Scenario& sc, SubchannelLayout layout);
Scenario scenario_from_json(const json& j);

/// {"<failed user id>": {"bs": n, "cluster": l, "fallback": bool}, ...}
json to_json(const AssociationMap& a);
AssociationMap association_from_json(const json& j);

json to_json(const PowerSolution& s);
PowerSolution solution_from_json(const json& j);

json to_json(const ViolationReport& r);
json to_json(const MetricsReport& r);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace noc
