#include "melseg/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "melseg/error.hpp"
#include "melseg/random.hpp"

namespace melseg {

namespace {

double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_sum_exp(const std::vector<double>& xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

void require_enumerable(const RbmModel& model) {
  if (model.visible() + model.hidden() > kMaxEnumerationUnits) {
    throw Error(ErrorCode::TooLargeForEnumeration,
                "r + q = " + std::to_string(model.visible() + model.hidden()) + " exceeds " +
                    std::to_string(kMaxEnumerationUnits));
  }
}

void require_visible(const RbmModel& model, Eigen::Index size) {
  if (size != model.visible()) {
    throw Error(ErrorCode::DimensionMismatch, "visible vector has length " +
                                                  std::to_string(size) + ", model expects " +
                                                  std::to_string(model.visible()));
  }
}

Eigen::MatrixXd sigmoid_rows(Eigen::MatrixXd pre, const Eigen::VectorXd& bias) {
  pre.rowwise() += bias.transpose();
  return pre.unaryExpr([](double x) { return sigmoid(x); });
}

// Multiplies by an inverted-dropout mask: kept entries are scaled by 1/keep
// so expected inputs match the full network and no rescaling is needed at
// inference time.
void apply_dropout(Eigen::MatrixXd& m, double drop, SplitMix64Engine& rng) {
  if (drop <= 0.0) return;
  const double keep = 1.0 - drop;
  const double scale = 1.0 / keep;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rng.uniform() < keep ? m(i, j) * scale : 0.0;
    }
  }
}

void sample_bernoulli(Eigen::MatrixXd& probs, SplitMix64Engine& rng) {
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      probs(i, j) = rng.uniform() < probs(i, j) ? 1.0 : 0.0;
    }
  }
}

bool all_finite(const RbmGradient& g) {
  return g.W.allFinite() && g.a.allFinite() && g.b.allFinite();
}

}  // namespace

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

RbmModel RbmModel::zeros(int visible, int hidden) {
  RbmModel m;
  m.W = Eigen::MatrixXd::Zero(visible, hidden);
  m.a = Eigen::VectorXd::Zero(visible);
  m.b = Eigen::VectorXd::Zero(hidden);
  m.W_fast = Eigen::MatrixXd::Zero(visible, hidden);
  m.a_fast = Eigen::VectorXd::Zero(visible);
  m.b_fast = Eigen::VectorXd::Zero(hidden);
  return m;
}

RbmModel RbmModel::random(int visible, int hidden, std::uint64_t seed, double init_std) {
  RbmModel m = zeros(visible, hidden);
  m.seed = seed;
  SplitMix64Engine rng(derive_key({seed, 0x696E6974ULL}));
  std::normal_distribution<double> normal(0.0, init_std);
  for (Eigen::Index i = 0; i < m.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.W.cols(); ++j) m.W(i, j) = normal(rng);
  }
  return m;
}

bool RbmModel::finite() const noexcept {
  return W.allFinite() && a.allFinite() && b.allFinite() && W_fast.allFinite() &&
         a_fast.allFinite() && b_fast.allFinite();
}

void TrainConfig::validate() const {
  const bool ok = epochs >= 0 && batch_size >= 1 && learning_rate >= 0 && momentum >= 0 &&
                  momentum < 1 && fast_lr_start >= 0 && fast_lr_end >= 0 && fast_decay >= 0 &&
                  fast_decay <= 1 && l2 >= 0 &&
                  sparsity_strength >= 0 && sparsity_target > 0 && sparsity_target < 1 &&
                  dropout_hidden >= 0 && dropout_hidden < 1 && dropout_visible >= 0 &&
                  dropout_visible < 1 && chain_size >= 1 && init_std >= 0;
  if (!ok) throw Error(ErrorCode::InvalidConfig, "RBM training configuration out of range");
}

int scheduled_batch_size(int n, int n_min, int n_max, int batch_min, int batch_max) {
  if (n <= n_min || n_max <= n_min) return batch_min;
  if (n >= n_max) return batch_max;
  const double t = static_cast<double>(n - n_min) / (n_max - n_min);
  return static_cast<int>(std::lround(batch_min + t * (batch_max - batch_min)));
}

Eigen::VectorXd hidden_probs(const RbmModel& model, const Eigen::VectorXd& v,
                             const std::vector<std::uint8_t>* dropout_mask) {
  require_visible(model, v.size());
  Eigen::VectorXd h = (model.b + model.W.transpose() * v).unaryExpr([](double x) {
    return sigmoid(x);
  });
  if (dropout_mask != nullptr) {
    if (static_cast<Eigen::Index>(dropout_mask->size()) != h.size()) {
      throw Error(ErrorCode::DimensionMismatch, "hidden dropout mask length");
    }
    for (Eigen::Index j = 0; j < h.size(); ++j) {
      if ((*dropout_mask)[j] == 0) h[j] = 0.0;
    }
  }
  return h;
}

Eigen::VectorXd visible_probs(const RbmModel& model, const Eigen::VectorXd& h,
                              const std::vector<std::uint8_t>* dropout_mask) {
  if (h.size() != model.hidden()) {
    throw Error(ErrorCode::DimensionMismatch, "hidden vector has length " +
                                                  std::to_string(h.size()) + ", model expects " +
                                                  std::to_string(model.hidden()));
  }
  Eigen::VectorXd v = (model.a + model.W * h).unaryExpr([](double x) { return sigmoid(x); });
  if (dropout_mask != nullptr) {
    if (static_cast<Eigen::Index>(dropout_mask->size()) != v.size()) {
      throw Error(ErrorCode::DimensionMismatch, "visible dropout mask length");
    }
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if ((*dropout_mask)[j] == 0) v[j] = 0.0;
    }
  }
  return v;
}

double free_energy(const RbmModel& model, const Eigen::VectorXd& v) {
  require_visible(model, v.size());
  const Eigen::VectorXd pre = model.b + model.W.transpose() * v;
  double f = -model.a.dot(v);
  for (Eigen::Index j = 0; j < pre.size(); ++j) f -= softplus(pre[j]);
  return f;
}

RbmGradient free_energy_gradient(const RbmModel& model, const Eigen::VectorXd& v) {
  require_visible(model, v.size());
  const Eigen::VectorXd h =
      (model.b + model.W.transpose() * v).unaryExpr([](double x) { return sigmoid(x); });
  return {-v * h.transpose(), -v, -h};
}

Eigen::VectorXd config_from_index(std::uint64_t index, int visible) {
  Eigen::VectorXd v(visible);
  for (int j = 0; j < visible; ++j) v[j] = static_cast<double>((index >> j) & 1U);
  return v;
}

std::vector<double> exact_distribution(const RbmModel& model) {
  require_enumerable(model);
  const std::uint64_t count = std::uint64_t{1} << model.visible();
  std::vector<double> neg_f(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    neg_f[k] = -free_energy(model, config_from_index(k, model.visible()));
  }
  const double log_z = log_sum_exp(neg_f);
  for (auto& x : neg_f) x = std::exp(x - log_z);
  return neg_f;
}

double exact_prob(const RbmModel& model, const Eigen::VectorXd& v) {
  require_visible(model, v.size());
  const auto dist = exact_distribution(model);
  std::uint64_t index = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0 && v[j] != 1.0) {
      throw Error(ErrorCode::DimensionMismatch, "exact_prob requires a binary vector");
    }
    if (v[j] == 1.0) index |= std::uint64_t{1} << j;
  }
  return dist[index];
}

std::vector<double> exact_conditional(const RbmModel& model, const Eigen::VectorXd& v,
                                      std::span<const int> free_indices) {
  require_enumerable(model);
  require_visible(model, v.size());
  for (int idx : free_indices) {
    if (idx < 0 || idx >= model.visible()) {
      throw Error(ErrorCode::DimensionMismatch, "free index out of range");
    }
  }
  const std::uint64_t count = std::uint64_t{1} << free_indices.size();
  std::vector<double> neg_f(count);
  Eigen::VectorXd x = v;
  for (std::uint64_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < free_indices.size(); ++i) {
      x[free_indices[i]] = static_cast<double>((k >> i) & 1U);
    }
    neg_f[k] = -free_energy(model, x);
  }
  const double log_z = log_sum_exp(neg_f);
  for (auto& f : neg_f) f = std::exp(f - log_z);
  return neg_f;
}

TrainResult train_fpcd(const BitMatrix& data, const TrainConfig& cfg, int hidden,
                       const BitMatrix& probe, const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.rows() == 0) throw Error(ErrorCode::EmptyStream, "no training rows");
  if (hidden < 1) throw Error(ErrorCode::InvalidConfig, "hidden unit count must be >= 1");

  const Eigen::Index rows = data.rows();
  const int visible = static_cast<int>(data.cols());
  TrainResult result;
  RbmModel& m = result.model;
  m = RbmModel::random(visible, hidden, cfg.seed, cfg.init_std);

  SplitMix64Engine rng(derive_key({cfg.seed, 0x7472616EULL}));

  Eigen::MatrixXd probe_rows;
  if (probe.rows() > 0) {
    probe_rows = probe.cast<double>();
  } else {
    probe_rows = data.topRows(std::min<Eigen::Index>(rows, 256)).cast<double>();
  }
  if (probe_rows.cols() != visible) {
    throw Error(ErrorCode::DimensionMismatch, "probe width differs from training data");
  }

  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, rows);
  const Eigen::Index batches_per_epoch = (rows + batch - 1) / batch;
  const double total_updates = static_cast<double>(cfg.epochs) * batches_per_epoch;

  Eigen::MatrixXd chain(cfg.chain_size, visible);
  for (Eigen::Index i = 0; i < chain.rows(); ++i) {
    for (Eigen::Index j = 0; j < visible; ++j) chain(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }

  Eigen::MatrixXd vel_W = Eigen::MatrixXd::Zero(visible, hidden);
  Eigen::VectorXd vel_a = Eigen::VectorXd::Zero(visible);
  Eigen::VectorXd vel_b = Eigen::VectorXd::Zero(hidden);

  std::vector<Eigen::Index> order(rows);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const double mu = cfg.sparsity_target;
  const double phi = cfg.sparsity_strength;
  double update = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own engine keeps the permutation portable.
    for (Eigen::Index i = rows - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }

    for (Eigen::Index start = 0; start < rows; start += batch) {
      const Eigen::Index size = std::min(batch, rows - start);
      Eigen::MatrixXd x(size, visible);
      for (Eigen::Index i = 0; i < size; ++i) x.row(i) = data.row(order[start + i]).cast<double>();

      const double progress = total_updates > 0 ? update / total_updates : 0.0;
      const double lr = cfg.learning_rate * (1.0 - progress);
      const double fast_lr = cfg.fast_lr_start + (cfg.fast_lr_end - cfg.fast_lr_start) * progress;

      // Positive phase on (dropped-out) data.
      Eigen::MatrixXd x_in = x;
      apply_dropout(x_in, cfg.dropout_visible, rng);
      const Eigen::MatrixXd p_pos = sigmoid_rows(x_in * m.W, m.b);
      Eigen::MatrixXd h_pos = p_pos;
      apply_dropout(h_pos, cfg.dropout_hidden, rng);

      // Advance the persistent chain one Gibbs sweep under slow + fast weights.
      const Eigen::MatrixXd W_total = m.W + m.W_fast;
      const Eigen::VectorXd a_total = m.a + m.a_fast;
      const Eigen::VectorXd b_total = m.b + m.b_fast;
      Eigen::MatrixXd chain_in = chain;
      apply_dropout(chain_in, cfg.dropout_visible, rng);
      Eigen::MatrixXd h_chain = sigmoid_rows(chain_in * W_total, b_total);
      sample_bernoulli(h_chain, rng);
      apply_dropout(h_chain, cfg.dropout_hidden, rng);
      chain = sigmoid_rows(h_chain * W_total.transpose(), a_total);
      sample_bernoulli(chain, rng);

      // Negative statistics from the new chain state under slow weights.
      Eigen::MatrixXd neg_in = chain;
      apply_dropout(neg_in, cfg.dropout_visible, rng);
      Eigen::MatrixXd h_neg = sigmoid_rows(neg_in * m.W, m.b);
      apply_dropout(h_neg, cfg.dropout_hidden, rng);

      const double inv_b = 1.0 / static_cast<double>(size);
      const double inv_c = 1.0 / static_cast<double>(chain.rows());
      RbmGradient g;
      g.W = x_in.transpose() * h_pos * inv_b - neg_in.transpose() * h_neg * inv_c - cfg.l2 * m.W;
      g.a = x.colwise().mean().transpose() - chain.colwise().mean().transpose();
      g.b = h_pos.colwise().mean().transpose() - h_neg.colwise().mean().transpose();

      if (phi > 0.0) {
        // Cross-entropy of each unit's batch-mean activation and of each
        // example's mean activation toward mu, back-propagated through the
        // logistic.
        auto ce_slope = [mu](double m_) {
          m_ = std::clamp(m_, 1e-6, 1.0 - 1e-6);
          return (m_ - mu) / (m_ * (1.0 - m_));
        };
        const Eigen::RowVectorXd unit_mean = p_pos.colwise().mean();
        const Eigen::VectorXd example_mean = p_pos.rowwise().mean();
        Eigen::MatrixXd d(size, hidden);
        for (Eigen::Index i = 0; i < size; ++i) {
          const double ei = ce_slope(example_mean[i]);
          for (Eigen::Index j = 0; j < hidden; ++j) {
            const double p = p_pos(i, j);
            d(i, j) = phi * (ce_slope(unit_mean[j]) + ei) * p * (1.0 - p);
          }
        }
        g.W -= x_in.transpose() * d * inv_b;
        g.b -= d.colwise().mean().transpose();
      }

      if (!all_finite(g)) {
        throw Error(ErrorCode::NonFiniteGradient,
                    "epoch " + std::to_string(epoch) + ", update " +
                        std::to_string(static_cast<long long>(update)) +
                        ": gradient contains NaN or Inf (learning rate " + std::to_string(lr) +
                        ", max |W| " + std::to_string(m.W.cwiseAbs().maxCoeff()) + ")");
      }

      vel_W = cfg.momentum * vel_W + lr * g.W;
      vel_a = cfg.momentum * vel_a + lr * g.a;
      vel_b = cfg.momentum * vel_b + lr * g.b;
      m.W += vel_W;
      m.a += vel_a;
      m.b += vel_b;

      m.W_fast = cfg.fast_decay * m.W_fast + fast_lr * g.W;
      m.a_fast = cfg.fast_decay * m.a_fast + fast_lr * g.a;
      m.b_fast = cfg.fast_decay * m.b_fast + fast_lr * g.b;

      update += 1.0;
    }

    double fe = 0.0;
    for (Eigen::Index i = 0; i < probe_rows.rows(); ++i) {
      fe += free_energy(m, probe_rows.row(i).transpose());
    }
    result.log.probe_free_energy.push_back(fe / static_cast<double>(probe_rows.rows()));
    m.epochs = epoch + 1;
    if (on_epoch) on_epoch(epoch, m);
  }

  m.W_fast.setZero();
  m.a_fast.setZero();
  m.b_fast.setZero();
  m.seed = cfg.seed;
  if (!m.finite()) throw Error(ErrorCode::NonFiniteGradient, "trained parameters are not finite");
  return result;
}

TrainResult train_fpcd(const NGramBatch& batch, const TrainConfig& cfg, int hidden,
                       const BitMatrix& probe, const EpochCallback& on_epoch) {
  auto result = train_fpcd(batch.rows, cfg, hidden, probe, on_epoch);
  result.model.n = batch.n;
  result.model.viewpoints = batch.viewpoints;
  return result;
}

}  // namespace melseg
