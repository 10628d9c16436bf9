#include "melseg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "melseg/error.hpp"
#include "melseg/random.hpp"

namespace melseg {

namespace {

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

void SamplerConfig::validate() const {
  if (particles < 1 || gibbs_steps < 1) {
    throw Error(ErrorCode::InvalidConfig, "sampler needs >= 1 particle and >= 1 Gibbs step");
  }
}

double binomial_estimate(const Eigen::MatrixXd& activations, const Eigen::VectorXd& v,
                         std::span<const int> free_indices) {
  if (activations.cols() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "activation width differs from v");
  }
  if (activations.rows() == 0) throw Error(ErrorCode::EmptyInput, "no particles");
  std::vector<double> logs(static_cast<std::size_t>(activations.rows()));
  for (Eigen::Index i = 0; i < activations.rows(); ++i) {
    double lp = 0.0;
    for (int j : free_indices) {
      const double q = activations(i, j);
      lp += v[j] != 0.0 ? safe_log(q) : safe_log(1.0 - q);
    }
    logs[static_cast<std::size_t>(i)] = lp;
  }
  const double hi = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(hi)) return 0.0;
  double sum = 0.0;
  for (double lp : logs) sum += std::exp(lp - hi);
  const double est = std::exp(hi + std::log(sum / static_cast<double>(logs.size())));
  return std::clamp(est, 0.0, 1.0);
}

double estimate_conditional(const RbmModel& model, const Eigen::VectorXd& v,
                            std::span<const int> free_indices, const SamplerConfig& cfg,
                            std::uint64_t stream, const SweepObserver& observer) {
  cfg.validate();
  if (free_indices.empty()) throw Error(ErrorCode::EmptyFreeSet, "no free visible units");
  if (v.size() != model.visible()) {
    throw Error(ErrorCode::DimensionMismatch, "visible vector has length " +
                                                  std::to_string(v.size()) + ", model expects " +
                                                  std::to_string(model.visible()));
  }
  const auto k = static_cast<Eigen::Index>(free_indices.size());
  const Eigen::Index q = model.hidden();
  for (int idx : free_indices) {
    if (idx < 0 || idx >= model.visible()) {
      throw Error(ErrorCode::DimensionMismatch, "free index out of range");
    }
  }

  // Hidden input from the clamped bits is fixed for the whole run.
  Eigen::VectorXd clamped = v;
  for (int idx : free_indices) clamped[idx] = 0.0;
  const Eigen::VectorXd hidden_base = model.b + model.W.transpose() * clamped;

  // Rows of W for the free units (k x q) and their transpose (q x k), both
  // contiguous in the direction they are summed.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w_free(k, q);
  Eigen::VectorXd a_free(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    w_free.row(i) = model.W.row(free_indices[i]);
    a_free[i] = model.a[free_indices[i]];
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w_free_t =
      w_free.transpose();

  Eigen::MatrixXd activations(cfg.particles, v.size());
  Eigen::VectorXd free_state(k);
  Eigen::VectorXd free_probs(k);
  Eigen::VectorXd hidden_pre(q);
  Eigen::VectorXd visible_pre(k);
  std::vector<Eigen::Index> active_visible;
  std::vector<Eigen::Index> active_hidden;
  active_visible.reserve(static_cast<std::size_t>(k));
  active_hidden.reserve(static_cast<std::size_t>(q));
  Eigen::VectorXd full_state;
  if (observer) full_state = v;

  for (int p = 0; p < cfg.particles; ++p) {
    SplitMix64Engine rng(derive_key({cfg.seed, stream, static_cast<std::uint64_t>(p)}));
    for (Eigen::Index i = 0; i < k; ++i) free_state[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;

    for (int sweep = 0; sweep < cfg.gibbs_steps; ++sweep) {
      active_visible.clear();
      for (Eigen::Index i = 0; i < k; ++i) {
        if (free_state[i] != 0.0) active_visible.push_back(i);
      }
      hidden_pre = hidden_base;
      for (auto i : active_visible) hidden_pre += w_free.row(i).transpose();

      active_hidden.clear();
      for (Eigen::Index j = 0; j < q; ++j) {
        if (rng.uniform() < sigmoid(hidden_pre[j])) active_hidden.push_back(j);
      }

      visible_pre = a_free;
      for (auto j : active_hidden) visible_pre += w_free_t.row(j).transpose();
      for (Eigen::Index i = 0; i < k; ++i) free_probs[i] = sigmoid(visible_pre[i]);

      if (sweep + 1 < cfg.gibbs_steps) {
        for (Eigen::Index i = 0; i < k; ++i) {
          free_state[i] = rng.uniform() < free_probs[i] ? 1.0 : 0.0;
        }
      }
      if (observer) {
        for (Eigen::Index i = 0; i < k; ++i) full_state[free_indices[i]] = free_state[i];
        observer(p, sweep, full_state);
      }
    }

    // Clamped positions hold v exactly, so they contribute a factor of 1.
    activations.row(p) = v.transpose();
    for (Eigen::Index i = 0; i < k; ++i) activations(p, free_indices[i]) = free_probs[i];
  }
  return binomial_estimate(activations, v, free_indices);
}

double estimate_prob(const RbmModel& model, const Eigen::VectorXd& v, const SamplerConfig& cfg,
                     std::uint64_t stream) {
  std::vector<int> all(static_cast<std::size_t>(model.visible()));
  std::iota(all.begin(), all.end(), 0);
  return estimate_conditional(model, v, all, cfg, stream);
}

double conditional_note_prob(const RbmModel& model, std::span<const std::uint8_t> row, int n,
                             const SamplerConfig& cfg, std::uint64_t stream) {
  const int width = model.viewpoints.note_width();
  if (n < 1 || static_cast<int>(row.size()) != n * width || model.visible() != n * width) {
    throw Error(ErrorCode::DimensionMismatch,
                "row width " + std::to_string(row.size()) + " does not match n = " +
                    std::to_string(n) + " columns of " + std::to_string(width) +
                    " bits for a model with " + std::to_string(model.visible()) + " visible units");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(row.size()));
  for (std::size_t i = 0; i < row.size(); ++i) v[static_cast<Eigen::Index>(i)] = row[i];
  std::vector<int> last(static_cast<std::size_t>(width));
  std::iota(last.begin(), last.end(), (n - 1) * width);
  const double p = estimate_conditional(model, v, last, cfg, stream);
  return std::max(p, kProbabilityFloor);
}

}  // namespace melseg
