#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "noc/barrier.hpp"
#include "noc/channel.hpp"
#include "noc/domain.hpp"
#include "noc/surrogate.hpp"

namespace noc {

struct DatasetConfig {
  TopologyConfig topology;
  SystemParams params;
  Mode mode = Mode::isolated;
  SubchannelLayout layout = SubchannelLayout::disjoint;
  /// Labeled samples to emit (one per BS serving a failed user).
  int n_samples = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  barrier::SolverConfig solver;
};

struct DatasetStats {
  int scenarios = 0;
  int infeasible = 0;
  int emitted = 0;
};

/// Scenario i uses topology seed `seed + i`. Scenarios are consumed in index
/// order until n_samples are emitted; infeasible ones are skipped and
/// counted. Raises ConfigError when more than half are infeasible.
std::vector<LabeledSample> generate_dataset(const DatasetConfig& cfg, DatasetStats* stats = nullptr);

struct DatasetSplit {
  std::vector<LabeledSample> train, val, test;
};

/// Seeded shuffle then cut by `ratios`; only the training part is augmented
/// with up to `augment` permutations per sample (new ids continue after the
/// largest input id).
DatasetSplit split_dataset(const std::vector<LabeledSample>& samples, std::array<double, 3> ratios,
                           std::uint64_t seed, int augment = 0);

void write_jsonl(std::ostream& out, const std::vector<LabeledSample>& samples);
std::vector<LabeledSample> read_jsonl(std::istream& in);
void write_jsonl(const std::string& path, const std::vector<LabeledSample>& samples);
std::vector<LabeledSample> read_jsonl(const std::string& path);

}  // namespace noc
