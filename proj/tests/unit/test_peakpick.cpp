#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "melseg/peakpick.hpp"

using namespace melseg;
using V = std::vector<std::uint8_t>;

TEST_SUITE("peakpick") {
  TEST_CASE("constant profile keeps only the final boundary") {
    CHECK(pick_boundaries({"c", {2, 2, 2, 2}}, {}) == V{0, 0, 0, 1});
    CHECK(pick_boundaries({"one", {5}}, {}) == V{1});
  }

  TEST_CASE("the [1,1,1,10] fixture") {
    const Bsp bsp{"f", {1, 1, 1, 10}};
    const double expected = 1.0 + std::sqrt(5.0 / 6.0);
    CHECK(peak_threshold(bsp.values, 3, {}) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(peak_threshold(bsp.values, 3, {}) == doctest::Approx(1.913).epsilon(1e-3));
    CHECK(pick_boundaries(bsp, {1.0}) == V{0, 0, 0, 1});
    // Index 3 is a real peak, not just the forced final: it survives when the
    // profile is extended with a lower value.
    CHECK(pick_boundaries({"g", {1, 1, 1, 10, 0.5}}, {1.0}) == V{0, 0, 0, 1, 1});
    CHECK(pick_boundaries({"h", {1, 1, 1, 1.5, 0.5}}, {1.0}) == V{0, 0, 0, 0, 1});
  }

  TEST_CASE("as-printed and standard weighted variance differ") {
    const std::vector<double> s{1, 2, 3};
    // m = (1 + 4 + 9) / 6 = 14/6
    const double m = 14.0 / 6.0;
    const double printed = ((1 - m) * (1 - m) + (4 - m) * (4 - m) + (9 - m) * (9 - m)) / 6.0;
    const double standard = (1 * (1 - m) * (1 - m) + 2 * (2 - m) * (2 - m) + 3 * (3 - m) * (3 - m)) / 6.0;
    CHECK(peak_threshold(s, 3, {1.0}) == doctest::Approx(m + std::sqrt(printed)));
    CHECK(peak_threshold(s, 3, {1.0, VarianceFormula::StandardWeighted}) ==
          doctest::Approx(m + std::sqrt(standard)));
    CHECK(peak_threshold(s, 3, {0.5}) == doctest::Approx(m + 0.5 * std::sqrt(printed)));
  }

  TEST_CASE("local peak rule: strict on the left, non-strict on the right") {
    PeakPickConfig tiny{1e-9, VarianceFormula::StandardWeighted};
    // plateau: the first element of a plateau is the peak
    CHECK(pick_boundaries({"p", {0, 5, 5, 0, 0}}, tiny) == V{0, 1, 0, 0, 1});
    CHECK(pick_boundaries({"q", {0, 5, 6, 0, 0}}, tiny) == V{0, 0, 1, 0, 1});
    // note 0 is never a boundary even when it is the maximum
    CHECK(pick_boundaries({"r", {9, 1, 1}}, tiny)[0] == 0);
  }

  TEST_CASE("positive scaling does not change the boundaries") {
    SplitMix64Engine rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
      Bsp bsp{"s", {}};
      const int len = 1 + static_cast<int>(rng() % 60);
      for (int i = 0; i < len; ++i) bsp.values.push_back(20.0 * rng.uniform());
      for (auto variance : {VarianceFormula::AsPrinted, VarianceFormula::StandardWeighted}) {
        for (double k : {0.3, 0.7, 1.0}) {
          const auto base = pick_boundaries(bsp, {k, variance});
          CHECK(base.size() == bsp.size());
          CHECK(base.back() == 1);
          if (bsp.size() >= 2) CHECK(base.front() == 0);
          for (double c : {0.1, 3.0, 1e3}) {
            Bsp scaled = bsp;
            for (auto& v : scaled.values) v *= c;
            CHECK(pick_boundaries(scaled, {k, variance}) == base);
          }
        }
      }
    }
  }

  TEST_CASE("argument errors") {
    CHECK_ERROR_CODE(pick_boundaries({"e", {}}, {}), ErrorCode::EmptyBsp);
    CHECK_ERROR_CODE(pick_boundaries({"e", {1}}, {0.0}), ErrorCode::InvalidConfig);
    CHECK_ERROR_CODE(sweep_k({}, {}, {}), ErrorCode::EmptyKSet);
  }

  TEST_CASE("k sweep") {
    const std::vector<Bsp> profiles{{"a", {1, 1, 1, 10, 1, 1, 1, 4, 1, 1}}};
    const std::vector<V> truth{{0, 0, 0, 1, 0, 0, 0, 0, 0, 1}};
    const auto single = sweep_k(profiles, truth, {0.9});
    CHECK(single.best_k == 0.9);
    CHECK(single.table.size() == 1);

    const auto sweep = sweep_k(profiles, truth, {1.0, 0.7, 0.8});
    REQUIRE(sweep.table.size() == 3);
    CHECK(sweep.table[0].k == 1.0);
    for (const auto& e : sweep.table) CHECK(sweep.best_f1 >= e.f1);
    // All three k give the same segmentation here, so the smallest wins.
    CHECK(sweep.table[0].f1 == sweep.table[1].f1);
    CHECK(sweep.best_k == 0.7);

    const auto raw = sweep_k(profiles, truth, kRawIcKSet, VarianceFormula::StandardWeighted);
    for (const auto& e : raw.table) CHECK(raw.best_f1 >= e.f1);
  }

  TEST_CASE("default k sets") {
    REQUIRE(kRawIcKSet.size() == 7);
    REQUIRE(kSmoothedKSet.size() == 7);
    CHECK(kRawIcKSet.front() == 0.70);
    CHECK(kRawIcKSet.back() == 1.00);
    CHECK(kSmoothedKSet.front() == 0.24);
    CHECK(kSmoothedKSet.back() == 0.36);
  }

  TEST_CASE("segmentation csv") {
    const std::vector<Segmentation> segs{{"a", {0, 1, 1}}, {"b", {1}}};
    const auto text = segmentation_to_csv(segs);
    CHECK(text == "melody_id,note_index,boundary\na,0,0\na,1,1\na,2,1\nb,0,1\n");
    const auto back = segmentation_from_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].boundaries == segs[0].boundaries);
    CHECK(back[1].melody_id == "b");
    CHECK_ERROR_CODE(segmentation_from_csv("x\n"), ErrorCode::MalformedHeader);
    CHECK_ERROR_CODE(segmentation_from_csv("melody_id,note_index,boundary\na,0,2\n"),
                     ErrorCode::ParseError);
  }
}
