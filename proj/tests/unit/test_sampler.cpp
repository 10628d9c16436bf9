#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "melseg/encoding.hpp"
#include "melseg/sampler.hpp"

using namespace melseg;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("binomial product") {
    Eigen::MatrixXd q(1, 2);
    q << 0.5, 0.5;
    const std::vector<int> all{0, 1};
    CHECK(binomial_estimate(q, vec({1, 0}), all) == doctest::Approx(0.25));

    Eigen::MatrixXd exact(3, 3);
    exact << 1, 0, 1, 1, 0, 1, 1, 0, 1;
    const std::vector<int> three{0, 1, 2};
    CHECK(binomial_estimate(exact, vec({1, 0, 1}), three) == 1.0);
    CHECK(binomial_estimate(exact, vec({0, 0, 1}), three) == 0.0);

    Eigen::MatrixXd mixed(2, 1);
    mixed << 0.2, 0.6;
    const std::vector<int> one{0};
    CHECK(binomial_estimate(mixed, vec({1}), one) == doctest::Approx(0.4));
    CHECK(binomial_estimate(mixed, vec({0}), one) == doctest::Approx(0.6));

    // 400 factors of 0.1 underflow a plain product but not the log-space sum.
    Eigen::MatrixXd tiny = Eigen::MatrixXd::Constant(2, 400, 0.1);
    std::vector<int> many(400);
    std::iota(many.begin(), many.end(), 0);
    const double est = binomial_estimate(tiny, Eigen::VectorXd::Ones(400), many);
    CHECK(est == 0.0);  // 1e-400 is below double range
    Eigen::MatrixXd moderate = Eigen::MatrixXd::Constant(2, 300, 0.1);
    std::vector<int> some(300);
    std::iota(some.begin(), some.end(), 0);
    CHECK(std::log10(binomial_estimate(moderate, Eigen::VectorXd::Ones(300), some)) ==
          doctest::Approx(-300.0));

    CHECK_ERROR_CODE(binomial_estimate(q, vec({1}), all), ErrorCode::DimensionMismatch);
  }

  TEST_CASE("independent unit with zero bias") {
    const auto zero = RbmModel::zeros(4, 3);
    SamplerConfig cfg{50, 5, 3};
    const std::vector<int> free{2};
    CHECK(estimate_conditional(zero, vec({1, 0, 1, 1}), free, cfg) == doctest::Approx(0.5));
    CHECK(estimate_prob(zero, vec({1, 0, 1, 1}), cfg) == doctest::Approx(1.0 / 16));
  }

  TEST_CASE("all-free conditional is the marginal estimate") {
    const auto model = test::oracle_model();
    SamplerConfig cfg{40, 30, 9};
    const std::vector<int> all{0, 1, 2, 3, 4, 5};
    for (std::uint64_t k : {0ULL, 17ULL, 51ULL}) {
      const auto v = config_from_index(k, 6);
      CHECK(estimate_prob(model, v, cfg, 4) == estimate_conditional(model, v, all, cfg, 4));
    }
  }

  TEST_CASE("marginal estimate approaches the exact value") {
    const auto model = test::oracle_model();
    const auto exact = exact_distribution(model);
    SamplerConfig cfg{2000, 200, 1};
    for (std::uint64_t k = 0; k < 64; ++k) {
      if (exact[k] < 0.05) continue;
      const double est = estimate_prob(model, config_from_index(k, 6), cfg, k);
      CHECK(std::abs(est - exact[k]) / exact[k] < 0.1);
    }
  }

  TEST_CASE("clamped bits never move and the conditional is close to exact") {
    const auto model = test::oracle_model();
    const auto v_clamp = vec({1, 0, 0, 0, 1, 0});
    const std::vector<int> free{1, 3, 5};
    const auto exact = exact_conditional(model, v_clamp, free);
    SamplerConfig cfg{2000, 200, 5};
    bool clamp_held = true;
    int observed = 0;
    for (int k = 0; k < 8; ++k) {
      auto v = v_clamp;
      for (int i = 0; i < 3; ++i) v[free[i]] = (k >> i) & 1;
      const double est = estimate_conditional(
          model, v, free, cfg, static_cast<std::uint64_t>(k),
          [&](int, int, const Eigen::VectorXd& state) {
            ++observed;
            clamp_held = clamp_held && state[0] == 1 && state[2] == 0 && state[4] == 1;
          });
      CHECK(std::abs(est - exact[k]) / exact[k] < 0.1);
    }
    CHECK(clamp_held);
    CHECK(observed == 8 * 2000 * 200);
  }

  TEST_CASE("estimates are reproducible per stream and lie in [0, 1]") {
    const auto model = test::seeded_model(8, 5, 4, 2.0);
    SamplerConfig cfg{30, 20, 12};
    const auto v = config_from_index(0b10110010, 8);
    const double a = estimate_prob(model, v, cfg, 7);
    CHECK(a == estimate_prob(model, v, cfg, 7));
    CHECK(a != estimate_prob(model, v, cfg, 8));
    for (std::uint64_t k = 0; k < 256; k += 5) {
      const double p = estimate_prob(model, config_from_index(k, 8), cfg, k);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }

  TEST_CASE("argument errors") {
    const auto model = test::oracle_model();
    SamplerConfig cfg{10, 10, 1};
    CHECK_ERROR_CODE(estimate_conditional(model, vec({1, 0, 0, 0, 1, 0}), {}, cfg),
                     ErrorCode::EmptyFreeSet);
    CHECK_ERROR_CODE(estimate_prob(model, vec({1, 0}), cfg), ErrorCode::DimensionMismatch);
    const std::vector<int> bad{9};
    CHECK_ERROR_CODE(estimate_conditional(model, vec({1, 0, 0, 0, 1, 0}), bad, cfg),
                     ErrorCode::DimensionMismatch);
    CHECK_ERROR_CODE(estimate_prob(model, vec({1, 0, 0, 0, 1, 0}), SamplerConfig{0, 10, 1}),
                     ErrorCode::InvalidConfig);
  }

  TEST_CASE("note conditional") {
    ViewpointConfig vp;
    auto one = RbmModel::random(41, 6, 3, 0.5);
    one.viewpoints = vp;
    one.n = 1;
    const auto m = test::flagged_melody("a", {1, 0, 0});
    const auto batch = encode_melody(m, 1, vp, 1);
    SamplerConfig cfg{20, 10, 6};
    std::span<const std::uint8_t> row(batch.rows.row(2).data(), 41);
    Eigen::VectorXd v(41);
    for (int i = 0; i < 41; ++i) v[i] = row[i];
    CHECK(conditional_note_prob(one, row, 1, cfg, 3) ==
          std::max(estimate_prob(one, v, cfg, 3), kProbabilityFloor));
    CHECK(conditional_note_prob(one, row, 1, cfg, 3) == conditional_note_prob(one, row, 1, cfg, 3));
    CHECK(conditional_note_prob(one, row, 1, cfg, 3) >= kProbabilityFloor);
    CHECK_ERROR_CODE(conditional_note_prob(one, row, 2, cfg), ErrorCode::DimensionMismatch);
  }

  TEST_CASE("an overfit 2-gram model predicts its only continuation") {
    ViewpointConfig vp;
    const auto m = test::make_melody("two", {{0, 2, 60, 1}, {2, 2, 64, 0}});
    const auto batch = encode_melody(m, 2, vp, 1);
    BitMatrix data(200, 82);
    for (Eigen::Index i = 0; i < 200; ++i) data.row(i) = batch.rows.row(1);
    TrainConfig tc;
    tc.epochs = 300;
    tc.batch_size = 50;
    tc.learning_rate = 0.1;
    tc.dropout_hidden = 0.0;
    tc.dropout_visible = 0.0;
    tc.sparsity_strength = 0.0;
    tc.chain_size = 20;
    auto model = train_fpcd(data, tc, 8).model;
    model.n = 2;
    model.viewpoints = vp;
    std::span<const std::uint8_t> row(batch.rows.row(1).data(), 82);
    CHECK(conditional_note_prob(model, row, 2, SamplerConfig{100, 50, 2}) > 0.9);
  }
}
