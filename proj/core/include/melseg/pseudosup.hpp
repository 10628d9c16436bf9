#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "melseg/corpus.hpp"
#include "melseg/encoding.hpp"
#include "melseg/infocontent.hpp"
#include "melseg/rbm.hpp"
#include "melseg/sampler.hpp"

namespace melseg {

// Feed-forward regressor: logistic hidden layers, one linear output unit.
// weights[l] maps layer l (rows) to layer l+1 (columns).
struct FfnnModel {
  std::vector<int> layers;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::string source_rbm_id;
  int n = 0;
  ViewpointConfig viewpoints;
  int epochs = 0;

  static FfnnModel zeros(const std::vector<int>& layers);
  // Hidden layers ~ N(0, init_std^2), biases zero.
  static FfnnModel random(const std::vector<int>& layers, std::uint64_t seed,
                          double init_std = 0.01);

  int inputs() const noexcept { return layers.front(); }
  bool finite() const noexcept;
};

// Forward pass without dropout; one output per row of x.
Eigen::VectorXd ffnn_forward(const FfnnModel& model, const Eigen::MatrixXd& x);

// mean_i (t_i - y_i)^2
double mse_loss(const FfnnModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& targets);

struct FfnnGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Exact gradient of mse_loss by backpropagation (no dropout, no L2).
FfnnGradient mse_gradient(const FfnnModel& model, const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& targets);

// IC of every note of a corpus under an RBM, aligned with the rows of
// encode_corpus(corpus, n, rbm.viewpoints, sampler.seed).
struct PseudoTargets {
  std::vector<double> targets;
  std::vector<RowMeta> row_meta;
  std::vector<std::string> melody_ids;
  std::string source_model_id;

  std::size_t size() const noexcept { return targets.size(); }
};

PseudoTargets make_pseudo_targets(const RbmModel& rbm, const Corpus& corpus, int n,
                                  const SamplerConfig& sampler, unsigned threads = 1);

// RBM training settings for pre-training the first hidden layer.
TrainConfig pretrain_defaults();

// Trains a (rows.cols() x hidden) RBM whose W and b seed the FFNN's first layer.
RbmModel pretrain_hidden(const NGramBatch& batch, int hidden, const TrainConfig& cfg);

// [inputs, rbm.q, (extra_hidden,) 1] network: first layer copied from the
// RBM, remaining layers random (seeded) with zero biases.
FfnnModel ffnn_from_rbm(const RbmModel& rbm, std::uint64_t seed, int extra_hidden = 0);

struct FinetuneConfig {
  int epochs = 100;
  int batch_size = 250;
  double learning_rate = 0.005;  // annealed linearly to 0
  double momentum = 0.6;
  double l2 = 0.01;
  double dropout_hidden = 0.5;
  double dropout_input = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
};

struct FinetuneLog {
  // Training MSE (full data, no dropout) before training and after each epoch.
  std::vector<double> mse;
  std::vector<double> beta;
  std::vector<double> entropy;
};

struct FinetuneResult {
  FfnnModel model;
  FinetuneLog log;
};

// Minimizes the squared error between network outputs and targets with
// mini-batch backpropagation. Throws NonFiniteLoss on divergence.
FinetuneResult finetune(const FfnnModel& init, const BitMatrix& rows,
                        const std::vector<double>& targets, const FinetuneConfig& cfg);

// Network outputs for every note; negative outputs are clamped to 0.
Bsp smoothed_bsp(const FfnnModel& model, const Melody& melody, int n, std::uint64_t seed);
std::vector<Bsp> smoothed_bsp_for_corpus(const FfnnModel& model, const Corpus& corpus, int n,
                                         std::uint64_t seed);

// N / sum_i (t_i - y_i)^2; +infinity for a perfect fit.
double precision_beta(const std::vector<double>& targets, const std::vector<double>& outputs);

// 1/2 log(2 pi / beta) + 1/2, in nats.
double gaussian_entropy(double beta);

std::string ffnn_to_json(const FfnnModel& model);
FfnnModel ffnn_from_json(std::string_view text);
void save_ffnn(const FfnnModel& model, const std::filesystem::path& path);
FfnnModel load_ffnn(const std::filesystem::path& path);

// Short stable identifier of an RBM (hash of its serialized form).
std::string rbm_fingerprint(const RbmModel& model);

}  // namespace melseg
