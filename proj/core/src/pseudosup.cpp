#include "melseg/pseudosup.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "melseg/error.hpp"
#include "melseg/io.hpp"
#include "melseg/random.hpp"

namespace melseg {

namespace {

using ojson = nlohmann::ordered_json;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd logistic(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double x) { return sigmoid(x); });
}

void require_rows(const FfnnModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.inputs()) {
    throw Error(ErrorCode::DimensionMismatch, "input width " + std::to_string(x.cols()) +
                                                  ", network expects " +
                                                  std::to_string(model.inputs()));
  }
}

// Inverted dropout mask: entries are 0 or 1/keep.
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double drop,
                             SplitMix64Engine& rng) {
  if (drop <= 0.0) return Eigen::MatrixXd::Ones(rows, cols);
  const double keep = 1.0 - drop;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
  }
  return m;
}

struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;  // input to each layer (after dropout)
  std::vector<Eigen::MatrixXd> masks;        // dropout mask applied to that input
  std::vector<Eigen::MatrixXd> raw;          // input to each layer before dropout
  Eigen::VectorXd output;
};

ForwardCache forward_cached(const FfnnModel& model, const Eigen::MatrixXd& x, double drop_input,
                            double drop_hidden, SplitMix64Engine* rng) {
  ForwardCache c;
  Eigen::MatrixXd a = x;
  const auto layers = model.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const double drop = l == 0 ? drop_input : drop_hidden;
    Eigen::MatrixXd mask = rng != nullptr ? dropout_mask(a.rows(), a.cols(), drop, *rng)
                                          : Eigen::MatrixXd::Ones(a.rows(), a.cols());
    c.raw.push_back(a);
    a = a.cwiseProduct(mask);
    c.activations.push_back(a);
    c.masks.push_back(std::move(mask));
    Eigen::MatrixXd z = a * model.weights[l];
    z.rowwise() += model.biases[l].transpose();
    a = l + 1 < layers ? logistic(z) : z;
  }
  c.output = a.col(0);
  return c;
}

FfnnGradient backward(const FfnnModel& model, const ForwardCache& c,
                      const Eigen::VectorXd& targets) {
  const auto layers = model.weights.size();
  const double inv_n = 1.0 / static_cast<double>(targets.size());
  FfnnGradient g;
  g.weights.resize(layers);
  g.biases.resize(layers);
  Eigen::MatrixXd delta = (2.0 * inv_n) * (c.output - targets);  // dL/dz at the linear output
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = c.activations[l].transpose() * delta;
    g.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    const Eigen::MatrixXd da = (delta * model.weights[l].transpose()).cwiseProduct(c.masks[l]);
    const Eigen::MatrixXd& s = c.raw[l];
    delta = da.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
  }
  return g;
}

ojson matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return flat;
}

}  // namespace

FfnnModel FfnnModel::zeros(const std::vector<int>& layers) {
  if (layers.size() < 2 || layers.back() != 1) {
    throw Error(ErrorCode::InvalidConfig, "network needs >= 2 layers and a single output unit");
  }
  FfnnModel m;
  m.layers = layers;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    if (layers[l] < 1) throw Error(ErrorCode::InvalidConfig, "layer sizes must be >= 1");
    m.weights.push_back(Eigen::MatrixXd::Zero(layers[l], layers[l + 1]));
    m.biases.push_back(Eigen::VectorXd::Zero(layers[l + 1]));
  }
  return m;
}

FfnnModel FfnnModel::random(const std::vector<int>& layers, std::uint64_t seed, double init_std) {
  FfnnModel m = zeros(layers);
  SplitMix64Engine rng(derive_key({seed, 0x66666E6EULL}));
  std::normal_distribution<double> normal(0.0, init_std);
  for (auto& w : m.weights) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = normal(rng);
    }
  }
  return m;
}

bool FfnnModel::finite() const noexcept {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

Eigen::VectorXd ffnn_forward(const FfnnModel& model, const Eigen::MatrixXd& x) {
  require_rows(model, x);
  return forward_cached(model, x, 0.0, 0.0, nullptr).output;
}

double mse_loss(const FfnnModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& targets) {
  if (targets.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "targets vs rows");
  if (targets.size() == 0) throw Error(ErrorCode::EmptyInput, "no rows");
  return (ffnn_forward(model, x) - targets).squaredNorm() / static_cast<double>(targets.size());
}

FfnnGradient mse_gradient(const FfnnModel& model, const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& targets) {
  require_rows(model, x);
  if (targets.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "targets vs rows");
  if (targets.size() == 0) throw Error(ErrorCode::EmptyInput, "no rows");
  return backward(model, forward_cached(model, x, 0.0, 0.0, nullptr), targets);
}

PseudoTargets make_pseudo_targets(const RbmModel& rbm, const Corpus& corpus, int n,
                                  const SamplerConfig& sampler, unsigned threads) {
  const auto profiles = bsp_for_corpus(rbm, corpus, n, sampler, threads);
  PseudoTargets out;
  out.source_model_id = rbm_fingerprint(rbm);
  for (std::size_t m = 0; m < profiles.size(); ++m) {
    out.melody_ids.push_back(profiles[m].melody_id);
    for (std::size_t t = 0; t < profiles[m].values.size(); ++t) {
      out.targets.push_back(profiles[m].values[t]);
      out.row_meta.push_back({static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(t)});
    }
  }
  return out;
}

TrainConfig pretrain_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.005;
  cfg.batch_size = 250;
  cfg.l2 = 0.01;
  return cfg;
}

RbmModel pretrain_hidden(const NGramBatch& batch, int hidden, const TrainConfig& cfg) {
  return train_fpcd(batch, cfg, hidden).model;
}

FfnnModel ffnn_from_rbm(const RbmModel& rbm, std::uint64_t seed, int extra_hidden) {
  std::vector<int> layers{rbm.visible(), rbm.hidden()};
  if (extra_hidden > 0) layers.push_back(extra_hidden);
  layers.push_back(1);
  FfnnModel m = FfnnModel::random(layers, seed);
  m.weights[0] = rbm.W;
  m.biases[0] = rbm.b;
  m.n = rbm.n;
  m.viewpoints = rbm.viewpoints;
  return m;
}

void FinetuneConfig::validate() const {
  const bool ok = epochs >= 0 && batch_size >= 1 && learning_rate >= 0 && momentum >= 0 &&
                  momentum < 1 && l2 >= 0 && dropout_hidden >= 0 && dropout_hidden < 1 && dropout_input >= 0 &&
                  dropout_input < 1;
  if (!ok) throw Error(ErrorCode::InvalidConfig, "fine-tune configuration out of range");
}

FinetuneResult finetune(const FfnnModel& init, const BitMatrix& rows,
                        const std::vector<double>& targets, const FinetuneConfig& cfg) {
  cfg.validate();
  if (rows.rows() != static_cast<Eigen::Index>(targets.size())) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(rows.rows()) + " rows but " +
                                               std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) throw Error(ErrorCode::EmptyInput, "no training rows");
  if (rows.cols() != init.inputs()) {
    throw Error(ErrorCode::DimensionMismatch, "row width differs from network input");
  }

  FinetuneResult result{init, {}};
  FfnnModel& m = result.model;
  const Eigen::MatrixXd x_all = rows.cast<double>();
  const Eigen::VectorXd t_all = Eigen::Map<const Eigen::VectorXd>(
      targets.data(), static_cast<Eigen::Index>(targets.size()));
  const auto n_rows = x_all.rows();

  auto record = [&] {
    const double mse = mse_loss(m, x_all, t_all);
    if (!std::isfinite(mse)) throw Error(ErrorCode::NonFiniteLoss, "training MSE is not finite");
    const double beta = mse > 0.0 ? 1.0 / mse : std::numeric_limits<double>::infinity();
    result.log.mse.push_back(mse);
    result.log.beta.push_back(beta);
    result.log.entropy.push_back(std::isfinite(beta) ? gaussian_entropy(beta)
                                                     : -std::numeric_limits<double>::infinity());
  };
  record();

  SplitMix64Engine rng(derive_key({cfg.seed, 0x66696E65ULL}));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_rows));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, n_rows);
  const Eigen::Index per_epoch = (n_rows + batch - 1) / batch;
  const double total = static_cast<double>(cfg.epochs) * per_epoch;
  double update = 0.0;

  std::vector<Eigen::MatrixXd> vel_w;
  std::vector<Eigen::VectorXd> vel_b;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    vel_w.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
    vel_b.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
  }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (Eigen::Index i = n_rows - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    for (Eigen::Index start = 0; start < n_rows; start += batch) {
      const Eigen::Index size = std::min(batch, n_rows - start);
      Eigen::MatrixXd x(size, x_all.cols());
      Eigen::VectorXd t(size);
      for (Eigen::Index i = 0; i < size; ++i) {
        x.row(i) = x_all.row(order[start + i]);
        t[i] = t_all[order[start + i]];
      }
      const double lr = cfg.learning_rate * (1.0 - update / total);
      const auto cache = forward_cached(m, x, cfg.dropout_input, cfg.dropout_hidden, &rng);
      auto g = backward(m, cache, t);
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        g.weights[l] += cfg.l2 * m.weights[l];
        if (!g.weights[l].allFinite() || !g.biases[l].allFinite()) {
          throw Error(ErrorCode::NonFiniteLoss,
                      "epoch " + std::to_string(epoch) + ": non-finite gradient in layer " +
                          std::to_string(l));
        }
        vel_w[l] = cfg.momentum * vel_w[l] - lr * g.weights[l];
        vel_b[l] = cfg.momentum * vel_b[l] - lr * g.biases[l];
        m.weights[l] += vel_w[l];
        m.biases[l] += vel_b[l];
      }
      update += 1.0;
    }
    m.epochs = epoch + 1;
    record();
  }
  return result;
}

Bsp smoothed_bsp(const FfnnModel& model, const Melody& melody, int n, std::uint64_t seed) {
  if (model.n != n) {
    throw Error(ErrorCode::ConfigMismatch, "network was trained on " + std::to_string(model.n) +
                                               "-grams, requested n = " + std::to_string(n));
  }
  const auto batch = encode_melody(melody, n, model.viewpoints, seed);
  const Eigen::VectorXd y = ffnn_forward(model, batch.rows.cast<double>());
  Bsp out{melody.id, {}};
  out.values.reserve(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) out.values.push_back(std::max(0.0, y[i]));
  return out;
}

std::vector<Bsp> smoothed_bsp_for_corpus(const FfnnModel& model, const Corpus& corpus, int n,
                                         std::uint64_t seed) {
  std::vector<Bsp> out;
  out.reserve(corpus.melodies.size());
  for (const auto& m : corpus.melodies) out.push_back(smoothed_bsp(model, m, n, seed));
  return out;
}

double precision_beta(const std::vector<double>& targets, const std::vector<double>& outputs) {
  if (targets.size() != outputs.size()) {
    throw Error(ErrorCode::LengthMismatch, "targets and outputs differ in length");
  }
  if (targets.empty()) throw Error(ErrorCode::EmptyInput, "precision of an empty sample");
  double ss = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = targets[i] - outputs[i];
    ss += r * r;
  }
  if (ss == 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(targets.size()) / ss;
}

double gaussian_entropy(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::NonPositiveBeta, "entropy needs a finite beta > 0");
  }
  return 0.5 * std::log(2.0 * std::numbers::pi / beta) + 0.5;
}

std::string rbm_fingerprint(const RbmModel& model) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_string(rbm_to_json(model))));
  return buf;
}

std::string ffnn_to_json(const FfnnModel& model) {
  ojson w = ojson::array();
  ojson b = ojson::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    w.push_back(matrix_to_json(model.weights[l]));
    b.push_back(std::vector<double>(model.biases[l].data(),
                                    model.biases[l].data() + model.biases[l].size()));
  }
  ojson doc;
  doc["format_version"] = 1;
  doc["kind"] = "ffnn";
  doc["layers"] = model.layers;
  doc["W"] = w;
  doc["b"] = b;
  doc["source_rbm_id"] = model.source_rbm_id;
  doc["n"] = model.n;
  doc["viewpoint_config"] = {{"abs_interval_bins", model.viewpoints.abs_interval_bins},
                             {"contour_bins", model.viewpoints.contour_bins},
                             {"ioi_bins", model.viewpoints.ioi_bins},
                             {"ooi_bins", model.viewpoints.ooi_bins}};
  doc["epochs"] = model.epochs;
  return doc.dump() + "\n";
}

FfnnModel ffnn_from_json(std::string_view text) {
  try {
    const auto doc = ojson::parse(text);
    if (doc.at("format_version").get<int>() != 1 || doc.at("kind").get<std::string>() != "ffnn") {
      throw Error(ErrorCode::ParseError, "not a format_version 1 ffnn document");
    }
    FfnnModel m = FfnnModel::zeros(doc.at("layers").get<std::vector<int>>());
    const auto& w = doc.at("W");
    const auto& b = doc.at("b");
    if (w.size() != m.weights.size() || b.size() != m.biases.size()) {
      throw Error(ErrorCode::DimensionMismatch, "layer count mismatch");
    }
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      const auto flat = w[l].get<std::vector<double>>();
      const auto bias = b[l].get<std::vector<double>>();
      auto& W = m.weights[l];
      if (flat.size() != static_cast<std::size_t>(W.size()) ||
          bias.size() != static_cast<std::size_t>(m.biases[l].size())) {
        throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " size mismatch");
      }
      W = Eigen::Map<const RowMatrix>(flat.data(), W.rows(), W.cols());
      m.biases[l] = Eigen::Map<const Eigen::VectorXd>(bias.data(), m.biases[l].size());
    }
    m.source_rbm_id = doc.at("source_rbm_id").get<std::string>();
    m.n = doc.value("n", 0);
    if (doc.contains("viewpoint_config")) {
      const auto& v = doc.at("viewpoint_config");
      m.viewpoints.abs_interval_bins = v.at("abs_interval_bins").get<int>();
      m.viewpoints.contour_bins = v.at("contour_bins").get<int>();
      m.viewpoints.ioi_bins = v.at("ioi_bins").get<int>();
      m.viewpoints.ooi_bins = v.at("ooi_bins").get<int>();
      m.viewpoints.validate();
    }
    m.epochs = doc.value("epochs", 0);
    if (!m.finite()) throw Error(ErrorCode::ParseError, "non-finite parameters");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ffnn file: ") + e.what());
  }
}

void save_ffnn(const FfnnModel& model, const std::filesystem::path& path) {
  write_text_file_atomic(path, ffnn_to_json(model));
}

FfnnModel load_ffnn(const std::filesystem::path& path) {
  return ffnn_from_json(read_text_file(path));
}

}  // namespace melseg
