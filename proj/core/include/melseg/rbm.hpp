#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "melseg/encoding.hpp"

namespace melseg {

// Binary-binary restricted Boltzmann machine with r visible and q hidden
// units. The fast parameters are only non-zero while training with FPCD.
struct RbmModel {
  Eigen::MatrixXd W;  // r x q
  Eigen::VectorXd a;  // visible bias
  Eigen::VectorXd b;  // hidden bias
  Eigen::MatrixXd W_fast;
  Eigen::VectorXd a_fast;
  Eigen::VectorXd b_fast;

  std::uint64_t seed = 0;
  int epochs = 0;
  // Encoding the model was trained on; n == 0 means "not an n-gram model".
  int n = 0;
  ViewpointConfig viewpoints;

  static RbmModel zeros(int visible, int hidden);
  // Weights ~ N(0, init_std^2), biases zero.
  static RbmModel random(int visible, int hidden, std::uint64_t seed, double init_std = 0.01);

  int visible() const noexcept { return static_cast<int>(W.rows()); }
  int hidden() const noexcept { return static_cast<int>(W.cols()); }
  bool finite() const noexcept;
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 250;
  double learning_rate = 0.0085;  // annealed linearly to 0 over training
  double momentum = 0.6;
  double fast_lr_start = 0.002;   // fast-weight learning rate, ramped linearly
  double fast_lr_end = 0.007;
  double fast_decay = 0.95;       // multiplicative, after every update
  double l2 = 0.0035;
  double sparsity_target = 0.04;  // mu
  double sparsity_strength = 0.65;  // phi
  double dropout_hidden = 0.5;
  double dropout_visible = 0.2;
  int chain_size = 100;           // persistent fantasy particles
  double init_std = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

// Optional linear batch-size schedule over n-gram lengths: batch_min at n_min
// up to batch_max at n_max, clamped outside that range.
int scheduled_batch_size(int n, int n_min = 3, int n_max = 10, int batch_min = 250,
                         int batch_max = 1000);

double sigmoid(double x) noexcept;

// sigma(b + W^T v); entries where `dropout_mask` is 0 are forced to 0.
Eigen::VectorXd hidden_probs(const RbmModel& model, const Eigen::VectorXd& v,
                             const std::vector<std::uint8_t>* dropout_mask = nullptr);
// sigma(a + W h); symmetric to hidden_probs.
Eigen::VectorXd visible_probs(const RbmModel& model, const Eigen::VectorXd& h,
                              const std::vector<std::uint8_t>* dropout_mask = nullptr);

// F(v) = -a.v - sum_j log(1 + exp(b_j + (W^T v)_j))
double free_energy(const RbmModel& model, const Eigen::VectorXd& v);

struct RbmGradient {
  Eigen::MatrixXd W;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

// Analytic gradient of free_energy with respect to every parameter.
RbmGradient free_energy_gradient(const RbmModel& model, const Eigen::VectorXd& v);

inline constexpr int kMaxEnumerationUnits = 20;

// Visible configuration with bit j of `index` as unit j.
Eigen::VectorXd config_from_index(std::uint64_t index, int visible);

// Exact p(v) over all 2^r visible configurations, indexed as config_from_index.
std::vector<double> exact_distribution(const RbmModel& model);
double exact_prob(const RbmModel& model, const Eigen::VectorXd& v);

// Exact distribution of the bits in `free_indices` given the remaining bits of
// `v`. Entry k assigns bit i of k to free_indices[i]. With no free bits the
// result is the point mass {1}.
std::vector<double> exact_conditional(const RbmModel& model, const Eigen::VectorXd& v,
                                      std::span<const int> free_indices);

struct TrainLog {
  // Mean free energy of the probe rows after each epoch.
  std::vector<double> probe_free_energy;
};

struct TrainResult {
  RbmModel model;
  TrainLog log;
};

using EpochCallback = std::function<void(int epoch, const RbmModel& model)>;

// Persistent contrastive divergence with fast weights. Rows are shuffled per
// epoch; training is single-threaded and fully determined by cfg.seed. If
// `probe` is empty, the first (up to) 256 training rows are used instead.
TrainResult train_fpcd(const BitMatrix& data, const TrainConfig& cfg, int hidden,
                       const BitMatrix& probe = {}, const EpochCallback& on_epoch = {});

TrainResult train_fpcd(const NGramBatch& batch, const TrainConfig& cfg, int hidden,
                       const BitMatrix& probe = {}, const EpochCallback& on_epoch = {});

// Versioned JSON model document.
std::string rbm_to_json(const RbmModel& model);
RbmModel rbm_from_json(std::string_view text);
void save_rbm(const RbmModel& model, const std::filesystem::path& path);
RbmModel load_rbm(const std::filesystem::path& path);

}  // namespace melseg
