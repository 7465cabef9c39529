#include "noc/surrogate.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"

namespace noc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Eigen::MatrixXd build_input(const Scenario& sc, int bs_id, const AssociationMap& assoc) {
  const int i = sc.bs_index(bs_id);
  const int q = sc.params.cluster_size;
  const int L = static_cast<int>(sc.clusters[i].size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Constant(q + 1, L, kNaN);
  bool serves = false;
  for (int l = 0; l < L; ++l) {
    const Cluster& c = sc.clusters[i][l];
    for (std::size_t r = 0; r < c.members.size() && static_cast<int>(r) < q; ++r) {
      H(r, l) = std::log10(sc.gain(bs_id, c.members[r]));
    }
    if (auto f = assoc.failed_user_of(ClusterRef{bs_id, l})) {
      H(q, l) = std::log10(sc.gain(bs_id, *f));
      serves = true;
    }
  }
  if (!serves) {
    throw ContractError("build_input: bs " + std::to_string(bs_id) + " serves no failed user");
  }
  return H;
}

Eigen::MatrixXd power_matrix(const Scenario& sc, int bs_id, const AssociationMap& assoc,
                             const BsPowers& powers) {
  const int i = sc.bs_index(bs_id);
  const int q = sc.params.cluster_size;
  const int L = static_cast<int>(sc.clusters[i].size());
  if (static_cast<int>(powers.clusters.size()) != L) {
    throw ContractError("power_matrix: cluster count mismatch");
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(q + 1, L, kNaN);
  for (int l = 0; l < L; ++l) {
    const auto& cp = powers.clusters[l];
    for (std::size_t r = 0; r < cp.connected.size() && static_cast<int>(r) < q; ++r) {
      P(r, l) = cp.connected[r];
    }
    if (assoc.failed_user_of(ClusterRef{bs_id, l})) P(q, l) = cp.failed.value_or(0.0);
  }
  return P;
}

BsPowers powers_from_matrix(const Scenario& sc, int bs_id, const AssociationMap& assoc,
                            const Eigen::MatrixXd& P) {
  const int i = sc.bs_index(bs_id);
  const int q = sc.params.cluster_size;
  BsPowers out;
  out.bs_id = bs_id;
  auto at = [&](int r, int l) {
    if (r >= P.rows() || l >= P.cols() || std::isnan(P(r, l))) return 0.0;
    return P(r, l);
  };
  for (std::size_t l = 0; l < sc.clusters[i].size(); ++l) {
    ClusterPowers cp;
    for (std::size_t r = 0; r < sc.clusters[i][l].members.size(); ++r) {
      cp.connected.push_back(at(static_cast<int>(r), static_cast<int>(l)));
    }
    if (assoc.failed_user_of(ClusterRef{bs_id, static_cast<int>(l)})) {
      cp.failed = at(q, static_cast<int>(l));
    }
    out.clusters.push_back(std::move(cp));
  }
  return out;
}

LabeledSample permute_sample(const LabeledSample& s, const std::vector<int>& rows,
                             const std::vector<int>& cols) {
  if (static_cast<int>(rows.size()) != s.q || static_cast<int>(cols.size()) != s.L) {
    throw ContractError("permute_sample: permutation sizes do not match the sample");
  }
  LabeledSample out = s;
  for (int c = 0; c < s.L; ++c) {
    for (int r = 0; r < s.q; ++r) {
      out.H(r, c) = s.H(rows[r], cols[c]);
      out.P(r, c) = s.P(rows[r], cols[c]);
    }
    out.H(s.q, c) = s.H(s.q, cols[c]);
    out.P(s.q, c) = s.P(s.q, cols[c]);
  }
  return out;
}

std::vector<LabeledSample> augment_permutations(const LabeledSample& s, int count,
                                                std::uint64_t seed) {
  std::vector<int> rows(s.q), cols(s.L);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  // Distinct combinations available, excluding the identity.
  double available = 1.0;
  for (int k = 2; k <= s.q; ++k) available *= k;
  for (int k = 2; k <= s.L; ++k) available *= k;
  const int target = static_cast<int>(std::min<double>(count, available - 1.0));

  std::mt19937_64 rng(seed);
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  seen.insert({rows, cols});
  std::vector<LabeledSample> out;
  while (static_cast<int>(out.size()) < target) {
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    if (!seen.insert({rows, cols}).second) continue;
    LabeledSample p = permute_sample(s, rows, cols);
    p.parent_id = s.id;
    out.push_back(std::move(p));
  }
  return out;
}

Mlp Mlp::glorot(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw ConfigError("Mlp: need at least input and output sizes");
  std::mt19937_64 rng(seed);
  Mlp net;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const int in = sizes[k];
    const int out = sizes[k + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    Eigen::MatrixXd w(out, in);
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) w(r, c) = u(rng);
    }
    net.W.push_back(std::move(w));
    net.b.push_back(Eigen::VectorXd::Zero(out));
  }
  return net;
}

std::vector<int> Mlp::sizes() const {
  std::vector<int> s;
  if (W.empty()) return s;
  s.push_back(static_cast<int>(W[0].cols()));
  for (const auto& w : W) s.push_back(static_cast<int>(w.rows()));
  return s;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd a = X;
  for (std::size_t k = 0; k < W.size(); ++k) {
    Eigen::MatrixXd z = W[k] * a;
    z.colwise() += b[k];
    a = k + 1 < W.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ContractError("mse_loss: shape mismatch");
  }
  if (pred.size() == 0) return 0.0;
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double loss_and_gradients(const Mlp& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          const Eigen::MatrixXd& mask, Gradients* grad) {
  const std::size_t layers = net.W.size();
  std::vector<Eigen::MatrixXd> z(layers), a(layers + 1);
  a[0] = X;
  for (std::size_t k = 0; k < layers; ++k) {
    z[k] = net.W[k] * a[k];
    z[k].colwise() += net.b[k];
    a[k + 1] = k + 1 < layers ? Eigen::MatrixXd(z[k].cwiseMax(0.0)) : z[k];
  }
  const double weight = std::max(mask.sum(), 1.0);
  const Eigen::MatrixXd diff = (a[layers] - Y).cwiseProduct(mask);
  const double loss = diff.cwiseProduct(a[layers] - Y).sum() / weight;
  if (grad == nullptr) return loss;

  grad->dW.resize(layers);
  grad->db.resize(layers);
  Eigen::MatrixXd dz = 2.0 * diff / weight;
  for (std::size_t k = layers; k-- > 0;) {
    grad->dW[k] = dz * a[k].transpose();
    grad->db[k] = dz.rowwise().sum();
    if (k == 0) break;
    Eigen::MatrixXd da = net.W[k].transpose() * dz;
    dz = da.cwiseProduct((z[k - 1].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

void nadam_step(Mlp& net, const Gradients& g, NadamState& st, const TrainConfig& cfg, int epoch) {
  const std::size_t layers = net.W.size();
  if (st.mW.size() != layers) {
    st.mW.clear();
    st.vW.clear();
    st.mb.clear();
    st.vb.clear();
    for (std::size_t k = 0; k < layers; ++k) {
      st.mW.push_back(Eigen::MatrixXd::Zero(net.W[k].rows(), net.W[k].cols()));
      st.vW.push_back(st.mW.back());
      st.mb.push_back(Eigen::VectorXd::Zero(net.b[k].size()));
      st.vb.push_back(st.mb.back());
    }
  }
  const double beta1 = cfg.decay_mode == DecayMode::beta1 ? cfg.decay : 0.9;
  const double lr =
      cfg.decay_mode == DecayMode::lr_schedule ? cfg.lr * std::pow(cfg.decay, epoch) : cfg.lr;
  const double b2 = cfg.beta2;
  const long long t = ++st.step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c1n = 1.0 - std::pow(beta1, static_cast<double>(t + 1));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));

  auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    const auto m_hat = (beta1 / c1n) * m + ((1.0 - beta1) / c1) * grad;
    const auto v_hat = v / c2;
    param.array() -= lr * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
  };
  for (std::size_t k = 0; k < layers; ++k) {
    update(net.W[k], st.mW[k], st.vW[k], g.dW[k]);
    update(net.b[k], st.mb[k], st.vb[k], g.db[k]);
  }
}

namespace {

/// Column-stacked feature vector, NaN where absent.
Eigen::VectorXd flat(const Eigen::MatrixXd& M, int q, int l_max) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant((q + 1) * l_max, kNaN);
  for (int c = 0; c < std::min<int>(static_cast<int>(M.cols()), l_max); ++c) {
    for (int r = 0; r <= q && r < M.rows(); ++r) v[c * (q + 1) + r] = M(r, c);
  }
  return v;
}

double encode_power(OutputEncoding e, double p) {
  return e == OutputEncoding::log10 ? std::log10(std::max(p, 1e-300)) : p;
}

double decode_power(OutputEncoding e, double y) {
  return e == OutputEncoding::log10 ? std::pow(10.0, y) : y;
}

void stats(const std::vector<Eigen::VectorXd>& rows, Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
  const Eigen::Index d = rows.empty() ? 0 : rows[0].size();
  mean = Eigen::VectorXd::Zero(d);
  sd = Eigen::VectorXd::Ones(d);
  for (Eigen::Index f = 0; f < d; ++f) {
    double s = 0.0, s2 = 0.0;
    long long n = 0;
    for (const auto& r : rows) {
      if (std::isnan(r[f])) continue;
      s += r[f];
      s2 += r[f] * r[f];
      ++n;
    }
    if (n == 0) continue;
    mean[f] = s / n;
    const double var = std::max(s2 / n - mean[f] * mean[f], 0.0);
    sd[f] = std::sqrt(var) > 1e-12 ? std::sqrt(var) : 1.0;
  }
}

struct Encoded {
  Eigen::MatrixXd X, Y, mask;
};

Encoded encode_all(const SurrogateModel& m, const std::vector<LabeledSample>& samples) {
  const int d = m.features();
  Encoded e{Eigen::MatrixXd(d, samples.size()), Eigen::MatrixXd::Zero(d, samples.size()),
            Eigen::MatrixXd::Zero(d, samples.size())};
  for (std::size_t j = 0; j < samples.size(); ++j) {
    e.X.col(j) = m.encode_input(samples[j].H);
    const Eigen::VectorXd p = flat(samples[j].P, m.q, m.l_max);
    for (int f = 0; f < d; ++f) {
      if (std::isnan(p[f])) continue;
      e.Y(f, j) = (encode_power(m.encoding, p[f]) - m.out_mean[f]) / m.out_std[f];
      e.mask(f, j) = 1.0;
    }
  }
  return e;
}

void check_shape(const LabeledSample& s, int q) {
  if (s.q != q || s.H.rows() != q + 1 || s.P.rows() != q + 1 || s.H.cols() != s.L ||
      s.P.cols() != s.L) {
    throw ConfigError("sample " + std::to_string(s.id) + " has an inconsistent shape");
  }
}

}  // namespace

Eigen::VectorXd SurrogateModel::encode_input(const Eigen::MatrixXd& H) const {
  const Eigen::VectorXd v = flat(H, q, l_max);
  Eigen::VectorXd x(v.size());
  for (Eigen::Index f = 0; f < v.size(); ++f) {
    x[f] = std::isnan(v[f]) ? pad : (v[f] - in_mean[f]) / in_std[f];
  }
  return x;
}

Eigen::MatrixXd SurrogateModel::predict(const Eigen::MatrixXd& H) const {
  const Eigen::VectorXd y = net.forward(encode_input(H));
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(H.rows(), H.cols(), kNaN);
  double total = 0.0;
  for (int c = 0; c < H.cols() && c < l_max; ++c) {
    for (int r = 0; r < H.rows() && r <= q; ++r) {
      if (std::isnan(H(r, c))) continue;
      const int f = c * (q + 1) + r;
      P(r, c) = std::max(0.0, decode_power(encoding, y[f] * out_std[f] + out_mean[f]));
      total += P(r, c);
    }
  }
  if (total > p_max && total > 0.0) {
    const double s = p_max / total;
    for (Eigen::Index k = 0; k < P.size(); ++k) {
      if (!std::isnan(P.data()[k])) P.data()[k] *= s;
    }
  }
  return P;
}

SurrogateModel train_surrogate(const std::vector<LabeledSample>& train,
                               const std::vector<LabeledSample>& val, const TrainConfig& cfg,
                               double p_max, TrainReport* report) {
  if (train.empty() || val.empty()) throw ConfigError("train: training and validation splits must be non-empty");
  if (cfg.batch < 1 || cfg.epochs < 1 || !(cfg.lr > 0.0)) {
    throw ConfigError("train: batch, epochs and learning rate must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  SurrogateModel m;
  m.q = train[0].q;
  m.l_max = 0;
  for (const auto* split : {&train, &val}) {
    for (const auto& s : *split) {
      check_shape(s, m.q);
      m.l_max = std::max(m.l_max, s.L);
    }
  }
  m.encoding = cfg.encoding;
  m.p_max = p_max;
  m.config = cfg;

  std::vector<Eigen::VectorXd> in_rows, out_rows;
  for (const auto& s : train) {
    in_rows.push_back(flat(s.H, m.q, m.l_max));
    Eigen::VectorXd p = flat(s.P, m.q, m.l_max);
    for (Eigen::Index f = 0; f < p.size(); ++f) {
      if (!std::isnan(p[f])) p[f] = encode_power(m.encoding, p[f]);
    }
    out_rows.push_back(std::move(p));
  }
  stats(in_rows, m.in_mean, m.in_std);
  stats(out_rows, m.out_mean, m.out_std);
  double lowest = 0.0;
  for (const auto& r : in_rows) {
    for (Eigen::Index f = 0; f < r.size(); ++f) {
      if (!std::isnan(r[f])) lowest = std::min(lowest, (r[f] - m.in_mean[f]) / m.in_std[f]);
    }
  }
  m.pad = lowest - 1.0;

  std::vector<int> sizes{m.features()};
  for (int k = 0; k < cfg.hidden_layers; ++k) sizes.push_back(cfg.hidden);
  sizes.push_back(m.features());
  m.net = Mlp::glorot(sizes, cfg.seed);

  const Encoded tr = encode_all(m, train);
  const Encoded va = encode_all(m, val);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  NadamState state;
  TrainReport rep;
  Mlp best = m.net;
  double best_val = std::numeric_limits<double>::infinity();
  const int d = m.features();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double acc = 0.0;
    for (std::size_t at = 0; at < order.size(); at += cfg.batch) {
      const int n = static_cast<int>(std::min<std::size_t>(cfg.batch, order.size() - at));
      Eigen::MatrixXd X(d, n), Y(d, n), M(d, n);
      for (int j = 0; j < n; ++j) {
        X.col(j) = tr.X.col(order[at + j]);
        Y.col(j) = tr.Y.col(order[at + j]);
        M.col(j) = tr.mask.col(order[at + j]);
      }
      Gradients g;
      acc += loss_and_gradients(m.net, X, Y, M, &g) * n;
      nadam_step(m.net, g, state, cfg, epoch);
    }
    rep.train_mse.push_back(acc / static_cast<double>(order.size()));
    const double v = loss_and_gradients(m.net, va.X, va.Y, va.mask, nullptr);
    rep.val_mse.push_back(v);
    if (v < best_val) {
      best_val = v;
      best = m.net;
      rep.best_epoch = epoch;
    }
  }
  m.net = std::move(best);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (report != nullptr) *report = std::move(rep);
  return m;
}

double evaluate_mse(const SurrogateModel& m, const std::vector<LabeledSample>& samples) {
  if (samples.empty()) return 0.0;
  const Encoded e = encode_all(m, samples);
  return loss_and_gradients(m.net, e.X, e.Y, e.mask, nullptr);
}

namespace {

constexpr char kMagic[4] = {'N', 'O', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw ConfigError("model file truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void save_model(const SurrogateModel& m, std::ostream& out) {
  nlohmann::json h;
  h["format"] = "noc-surrogate";
  h["layer_sizes"] = m.net.sizes();
  h["activation"] = "relu";
  h["q"] = m.q;
  h["l_max"] = m.l_max;
  h["input_mean"] = to_vec(m.in_mean);
  h["input_std"] = to_vec(m.in_std);
  h["pad"] = m.pad;
  h["output_encoding"] = m.encoding == OutputEncoding::log10 ? "log10" : "linear";
  h["output_mean"] = to_vec(m.out_mean);
  h["output_std"] = to_vec(m.out_std);
  h["p_max_mw"] = m.p_max;
  h["train"] = {{"batch", m.config.batch},
                {"lr", m.config.lr},
                {"decay", m.config.decay},
                {"decay_mode", m.config.decay_mode == DecayMode::beta1 ? "beta1" : "lr_schedule"},
                {"epochs", m.config.epochs},
                {"seed", m.config.seed},
                {"hidden", m.config.hidden},
                {"hidden_layers", m.config.hidden_layers},
                {"beta2", m.config.beta2},
                {"epsilon", m.config.epsilon}};
  const std::string header = h.dump();
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (std::size_t k = 0; k < m.net.W.size(); ++k) {
    const auto& w = m.net.W[k];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_le<double>(out, w(r, c));
    }
    for (Eigen::Index r = 0; r < m.net.b[k].size(); ++r) put_le<double>(out, m.net.b[k][r]);
  }
  if (!out) throw ConfigError("failed to write model");
}

SurrogateModel load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("not a surrogate model file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw ConfigError("unsupported model version " + std::to_string(version));
  const auto len = get_le<std::uint64_t>(in);
  std::string header(len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(len))) {
    throw ConfigError("model file truncated");
  }
  const auto h = nlohmann::json::parse(header);
  SurrogateModel m;
  m.q = h.at("q");
  m.l_max = h.at("l_max");
  m.in_mean = from_vec(h.at("input_mean").get<std::vector<double>>());
  m.in_std = from_vec(h.at("input_std").get<std::vector<double>>());
  m.pad = h.at("pad");
  m.encoding = h.at("output_encoding") == "linear" ? OutputEncoding::linear : OutputEncoding::log10;
  m.out_mean = from_vec(h.at("output_mean").get<std::vector<double>>());
  m.out_std = from_vec(h.at("output_std").get<std::vector<double>>());
  m.p_max = h.at("p_max_mw");
  const auto& t = h.at("train");
  m.config.batch = t.at("batch");
  m.config.lr = t.at("lr");
  m.config.decay = t.at("decay");
  m.config.decay_mode = t.at("decay_mode") == "lr_schedule" ? DecayMode::lr_schedule : DecayMode::beta1;
  m.config.epochs = t.at("epochs");
  m.config.seed = t.at("seed");
  m.config.hidden = t.at("hidden");
  m.config.hidden_layers = t.at("hidden_layers");
  m.config.beta2 = t.at("beta2");
  m.config.epsilon = t.at("epsilon");
  m.config.encoding = m.encoding;
  const auto sizes = h.at("layer_sizes").get<std::vector<int>>();
  if (sizes.size() < 2 || sizes.front() != m.features() || sizes.back() != m.features()) {
    throw ConfigError("model header layer sizes disagree with its layout");
  }
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    Eigen::MatrixXd w(sizes[k + 1], sizes[k]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_le<double>(in);
    }
    Eigen::VectorXd b(sizes[k + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = get_le<double>(in);
    m.net.W.push_back(std::move(w));
    m.net.b.push_back(std::move(b));
  }
  return m;
}

void save_model(const SurrogateModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  save_model(m, out);
}

SurrogateModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file " + path);
  return load_model(in);
}

}  // namespace noc
