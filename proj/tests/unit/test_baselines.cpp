#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "melseg/baselines.hpp"
#include "melseg/evalharness.hpp"
#include "melseg/metrics.hpp"
#include "melseg/peakpick.hpp"

using namespace melseg;
using V = std::vector<std::uint8_t>;

TEST_SUITE("baselines") {
  TEST_CASE("always and never") {
    CHECK(baseline_always(test::flagged_melody("a", {1, 0, 0, 0})) == V{0, 1, 1, 1});
    CHECK(baseline_always(test::flagged_melody("b", {1})) == V{1});
    CHECK(baseline_never(test::flagged_melody("c", {1})) == V{1});
    CHECK(baseline_never(test::flagged_melody("d", {1, 0})) == V{0, 1});
    CHECK(baseline_never(test::flagged_melody("e", {1, 0, 1, 0, 0})) == V{0, 0, 0, 0, 1});
  }

  TEST_CASE("gpr 2a marks rests") {
    const auto legato = test::flagged_melody("l", {1, 0, 1, 0});
    CHECK(baseline_gpr2a(legato) == V{0, 0, 0, 1});
    const auto m = test::make_melody("r", {{0, 2, 60, 1}, {2, 2, 62, 0}, {8, 2, 64, 1}});
    CHECK(baseline_gpr2a(m) == V{0, 0, 1});
    const auto mid = test::make_melody("m", {{0, 2, 60, 1}, {3, 2, 62, 0}, {5, 2, 64, 0}, {7, 1, 65, 0}});
    CHECK(baseline_gpr2a(mid) == V{0, 1, 0, 1});
  }

  TEST_CASE("gpr 2a is exact on rest-cued synthetic boundaries") {
    SynthSpec spec;
    spec.melodies = 40;
    spec.rest_cue_share = 1.0;
    const auto corpus = generate_synthetic_corpus(spec, 3);
    std::vector<V> pred, truth;
    for (const auto& m : corpus.melodies) {
      pred.push_back(baseline_gpr2a(m));
      truth.push_back(boundary_vector(m));
    }
    const auto prf = prf1(pred, truth);
    CHECK(prf.precision == 1.0);
    CHECK(prf.recall == 1.0);
  }

  TEST_CASE("hand-counted digram strengths") {
    // Symbols: F (first note), U (+2 semitones), U, D (-2 semitones).
    Corpus c;
    c.melodies.push_back(test::make_melody("h", {{0, 2, 60, 1}, {2, 2, 62, 0}, {4, 2, 64, 0}, {6, 2, 62, 0}}));
    const ViewpointConfig vp;
    const auto stats = build_digram_stats(c, vp);
    const int f = NoteSymbol{}.index(vp);
    const int u = NoteSymbol{2, Contour::Up, 2, 0}.index(vp);
    const int d = NoteSymbol{2, Contour::Down, 2, 0}.index(vp);
    CHECK(stats.alphabet_size() == 4);
    CHECK(stats.unigram_total == 4);
    CHECK(stats.digram_total == 3);
    CHECK(stats.count(u) == 2);
    CHECK(stats.count(u, d) == 1);
    CHECK(stats.count(d, u) == 0);

    // TP: (c(a,b) + 1) / (c(a, .) + V)
    CHECK(transition_strength(stats, u, d) == doctest::Approx(std::log2(3.0)));
    CHECK(transition_strength(stats, u, u) == doctest::Approx(std::log2(3.0)));
    CHECK(transition_strength(stats, f, u) == doctest::Approx(std::log2(2.5)));
    CHECK(transition_strength(stats, d, f) == doctest::Approx(2.0));
    // PMI: P(a,b) = 2/19, P(U) = 3/8, P(D) = 2/8
    CHECK(pmi_strength(stats, u, d) == doctest::Approx(-std::log2((2.0 / 19.0) / (3.0 / 8.0 * 2.0 / 8.0))));
    CHECK(std::isfinite(pmi_strength(stats, d, f)));

    const auto profile = digram_profile(stats, c.melodies[0], DigramMethod::TransitionProbability);
    REQUIRE(profile.size() == 4);
    CHECK(profile.values[0] == 0.0);
    CHECK(profile.values[1] == doctest::Approx(std::log2(2.5)));
    CHECK(profile.values[3] == doctest::Approx(std::log2(3.0)));
  }

  TEST_CASE("alternating corpus gives a flat profile after the opening pair") {
    Corpus c;
    Melody m;
    m.id = "alt";
    for (int i = 0; i < 30; ++i) m.notes.push_back({2 * i, 2, i % 2 ? 62 : 60, i == 0});
    c.melodies.push_back(m);
    const auto stats = build_digram_stats(c);
    for (auto method : {DigramMethod::TransitionProbability, DigramMethod::PointwiseMutualInformation}) {
      const auto p = digram_profile(stats, m, method);
      for (std::size_t t = 3; t < p.size(); ++t) CHECK(p.values[t] == doctest::Approx(p.values[2]));
      const auto b = pick_boundaries(p, {0.7});
      for (std::size_t t = 2; t + 1 < b.size(); ++t) CHECK(b[t] == 0);
    }
  }

  TEST_CASE("unseen symbols stay finite and empty training is rejected") {
    Corpus train;
    train.melodies.push_back(test::flagged_melody("t", {1, 0, 0}));
    const auto stats = build_digram_stats(train);
    const auto odd = test::make_melody("o", {{0, 1, 30, 1}, {40, 1, 90, 0}, {41, 7, 20, 1}});
    for (auto method : {DigramMethod::TransitionProbability, DigramMethod::PointwiseMutualInformation}) {
      for (double v : digram_profile(stats, odd, method).values) CHECK(std::isfinite(v));
    }
    Corpus single;
    single.melodies.push_back(test::flagged_melody("s", {1}));
    CHECK_ERROR_CODE(build_digram_stats(single), ErrorCode::EmptyTrainingSet);
    CHECK(to_string(DigramMethod::TransitionProbability) == "TP");
    CHECK(to_string(DigramMethod::PointwiseMutualInformation) == "PMI");
  }
}
