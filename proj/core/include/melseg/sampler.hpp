#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "melseg/rbm.hpp"

namespace melseg {

struct SamplerConfig {
  int particles = 150;
  int gibbs_steps = 150;
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr double kProbabilityFloor = 1e-12;

// Observes the full visible state of one fantasy particle after each sweep
// (clamped entries included). Used to assert clamping in tests.
using SweepObserver =
    std::function<void(int particle, int sweep, const Eigen::VectorXd& visible_state)>;

// Mean over particles of prod_{j in free} q_ij^{v_j} (1 - q_ij)^{1 - v_j},
// where row i of `activations` is particle i's visible activation vector.
// Products are accumulated in log space; the result is clamped to [0, 1].
double binomial_estimate(const Eigen::MatrixXd& activations, const Eigen::VectorXd& v,
                         std::span<const int> free_indices);

// Monte-Carlo estimate of p(v). Each particle starts uniformly at random and
// runs cfg.gibbs_steps sweeps; the last sweep's visible probabilities feed
// binomial_estimate. `stream` selects an independent set of particle RNG
// streams; particle i uses the stream keyed by (cfg.seed, stream, i).
double estimate_prob(const RbmModel& model, const Eigen::VectorXd& v, const SamplerConfig& cfg,
                     std::uint64_t stream = 0);

// Estimate of p(v_free | v_clamped): bits outside `free_indices` are held at
// their values in v throughout sampling and contribute a factor of 1.
double estimate_conditional(const RbmModel& model, const Eigen::VectorXd& v,
                            std::span<const int> free_indices, const SamplerConfig& cfg,
                            std::uint64_t stream = 0, const SweepObserver& observer = {});

// Probability of the last note column of an n-gram row given the n-1 context
// columns (for n == 1, the marginal of the whole row), floored at
// kProbabilityFloor.
double conditional_note_prob(const RbmModel& model, std::span<const std::uint8_t> row, int n,
                             const SamplerConfig& cfg, std::uint64_t stream = 0);

}  // namespace melseg
