#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noc/domain.hpp"

namespace noc {

/// One per-BS training pair. H holds log10 gains and P powers in mW, both
/// (q+1) x L: column l is cluster l, rows 0..q-1 its connected members in SIC
/// order, row q the failed member. Absent entries are NaN.
struct LabeledSample {
  long long id = 0;
  /// Id of the sample this one was permuted from; -1 for originals.
  long long parent_id = -1;
  std::uint64_t scenario_seed = 0;
  int bs_id = 0;
  int q = 0;
  int L = 0;
  Eigen::MatrixXd H;
  Eigen::MatrixXd P;
  /// Free-form JSON object text.
  std::string meta = "{}";
};

/// Input matrix for `bs_id` under `assoc`. Throws ContractError when the BS
/// serves no failed user.
Eigen::MatrixXd build_input(const Scenario& sc, int bs_id, const AssociationMap& assoc);

/// Target matrix with the same layout as build_input.
Eigen::MatrixXd power_matrix(const Scenario& sc, int bs_id, const AssociationMap& assoc,
                             const BsPowers& powers);

/// Inverse of power_matrix; NaN entries become 0.
BsPowers powers_from_matrix(const Scenario& sc, int bs_id, const AssociationMap& assoc,
                            const Eigen::MatrixXd& P);

/// Applies row permutation `rows` to rows 0..q-1 (row q stays) and column
/// permutation `cols`: out(r, c) = in(rows[r], cols[c]).
LabeledSample permute_sample(const LabeledSample& s, const std::vector<int>& rows,
                             const std::vector<int>& cols);

/// Up to `count` distinct non-identity (row, column) permutations of `s`.
std::vector<LabeledSample> augment_permutations(const LabeledSample& s, int count,
                                                std::uint64_t seed);

/// Fully connected ReLU network with a linear output layer. Activations are
/// columns: forward maps a D0 x B batch to D_M x B.
struct Mlp {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;

  static Mlp glorot(const std::vector<int>& sizes, std::uint64_t seed);
  std::vector<int> sizes() const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
};

/// Mean of squared differences over all entries.
double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

/// Masked MSE sum(mask * (f(X) - Y)^2) / sum(mask) and, when `grad` is
/// non-null, its gradient by backpropagation.
double loss_and_gradients(const Mlp& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          const Eigen::MatrixXd& mask, Gradients* grad);

enum class DecayMode {
  /// Decay rate is Nadam's first-moment coefficient.
  beta1,
  /// Decay rate multiplies the learning rate once per epoch; beta1 stays 0.9.
  lr_schedule,
};

enum class OutputEncoding { log10, linear };

struct TrainConfig {
  int batch = 128;
  double lr = 5e-4;
  double decay = 0.9;
  DecayMode decay_mode = DecayMode::beta1;
  int epochs = 60;
  std::uint64_t seed = 1;
  int hidden = 200;
  int hidden_layers = 3;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  OutputEncoding encoding = OutputEncoding::log10;
};

struct NadamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  long long step = 0;
};

/// One Nadam update. `epoch` only matters for DecayMode::lr_schedule.
void nadam_step(Mlp& net, const Gradients& g, NadamState& state, const TrainConfig& cfg,
                int epoch = 0);

struct SurrogateModel {
  int q = 2;
  int l_max = 2;
  Mlp net;
  Eigen::VectorXd in_mean, in_std;
  /// Normalized value fed for absent inputs.
  double pad = -1.0;
  OutputEncoding encoding = OutputEncoding::log10;
  Eigen::VectorXd out_mean, out_std;
  double p_max = 0.0;
  TrainConfig config;

  int features() const { return (q + 1) * l_max; }
  /// Normalized network input (features x 1) for a sample matrix.
  Eigen::VectorXd encode_input(const Eigen::MatrixXd& H) const;
  /// Predicted power matrix in mW, NaN where H is absent; clamped at zero and
  /// scaled uniformly onto the p_max budget.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& H) const;
};

struct TrainReport {
  std::vector<double> train_mse;
  std::vector<double> val_mse;
  int best_epoch = -1;
  double seconds = 0.0;
};

/// Fits a model on `train`, keeping the weights of the best validation epoch.
/// Empty splits raise ConfigError.
SurrogateModel train_surrogate(const std::vector<LabeledSample>& train,
                               const std::vector<LabeledSample>& val, const TrainConfig& cfg,
                               double p_max, TrainReport* report = nullptr);

/// Mean masked MSE of the model on `samples` in the model's encoded space.
double evaluate_mse(const SurrogateModel& m, const std::vector<LabeledSample>& samples);

void save_model(const SurrogateModel& m, std::ostream& out);
SurrogateModel load_model(std::istream& in);
void save_model(const SurrogateModel& m, const std::string& path);
SurrogateModel load_model(const std::string& path);

}  // namespace noc
