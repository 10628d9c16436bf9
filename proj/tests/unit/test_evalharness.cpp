#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "melseg/evalharness.hpp"

using namespace melseg;
using V = std::vector<std::uint8_t>;

namespace {

Corpus small_synth(int melodies, std::uint64_t seed) {
  SynthSpec spec;
  spec.melodies = melodies;
  return generate_synthetic_corpus(spec, seed);
}

}  // namespace

TEST_SUITE("evalharness") {
  TEST_CASE("prf1 hand count") {
    const auto c = count_matches({{0, 1, 1, 0, 1}}, {{0, 1, 0, 0, 1}});
    CHECK(c.tp == 2);
    CHECK(c.fp == 1);
    CHECK(c.fn == 0);
    const auto m = prf1({{0, 1, 1, 0, 1}}, {{0, 1, 0, 0, 1}});
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == doctest::Approx(0.8));
    const auto same = prf1({{0, 1, 0, 1}}, {{0, 1, 0, 1}});
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.f1 == 1.0);
  }

  TEST_CASE("zero-denominator conventions") {
    const auto none = prf_from_counts({0, 0, 3});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    const auto no_truth = prf_from_counts({0, 2, 0});
    CHECK(no_truth.recall == 0.0);
    CHECK(no_truth.f1 == 0.0);
    CHECK_ERROR_CODE(count_matches({{0, 1}}, {{0, 1, 1}}), ErrorCode::LengthMismatch);
    CHECK_ERROR_CODE(count_matches({{0, 1}}, {}), ErrorCode::LengthMismatch);
  }

  TEST_CASE("all-ones prediction scores the closed form") {
    const auto corpus = small_synth(30, 4);
    std::vector<V> pred, truth;
    for (const auto& m : corpus.melodies) {
      pred.push_back(baseline_always(m));
      truth.push_back(boundary_vector(m));
    }
    const double b = boundary_density(corpus);
    const auto m = prf1(pred, truth);
    CHECK(std::abs(m.precision - b) < 1e-12);
    CHECK(m.recall == 1.0);
    CHECK(std::abs(m.f1 - 2 * b / (1 + b)) < 1e-12);
  }

  TEST_CASE("fold plan") {
    const auto corpus = small_synth(23, 1);
    const auto plan = make_fold_plan(corpus, 5, 77);
    std::vector<int> sizes(5, 0);
    for (const auto& m : corpus.melodies) ++sizes[plan.fold_of(m.id)];
    for (int s : sizes) {
      CHECK(s >= 4);
      CHECK(s <= 5);
    }
    auto reversed = corpus;
    std::reverse(reversed.melodies.begin(), reversed.melodies.end());
    CHECK(make_fold_plan(reversed, 5, 77).assignment == plan.assignment);
    CHECK(make_fold_plan(corpus, 5, 78).assignment != plan.assignment);

    std::size_t total = 0;
    for (int f = 0; f < 5; ++f) {
      const auto test = fold_subset(corpus, plan, f, false);
      const auto train = fold_subset(corpus, plan, f, true);
      CHECK(test.melodies.size() + train.melodies.size() == corpus.melodies.size());
      total += test.melodies.size();
    }
    CHECK(total == corpus.melodies.size());

    CHECK_ERROR_CODE(make_fold_plan(small_synth(4, 1), 5, 1), ErrorCode::FoldTooSmall);
    CHECK_ERROR_CODE(make_fold_plan(corpus, 1, 1), ErrorCode::InvalidConfig);
    CHECK_ERROR_CODE(plan.fold_of("nope"), ErrorCode::InvalidConfig);
  }

  TEST_CASE("pipeline names") {
    for (const char* name : {"rbm", "rbm+ps", "baseline:always", "baseline:never",
                             "baseline:gpr2a", "baseline:tp", "baseline:pmi"}) {
      CHECK(to_string(pipeline_from_string(name)) == name);
    }
    CHECK_ERROR_CODE(pipeline_from_string("baseline:lbdm"), ErrorCode::InvalidConfig);
  }

  TEST_CASE("synthetic corpus") {
    const auto a = small_synth(200, 9);
    const auto b = small_synth(200, 9);
    REQUIRE(a.melodies.size() == 200);
    for (std::size_t i = 0; i < 200; ++i) {
      CHECK(serialize_melody(a.melodies[i]) == serialize_melody(b.melodies[i]));
    }
    CHECK(a.melodies[7].id == "synth_0007");
    const double density = boundary_density(a);
    CHECK(density >= 0.10);
    CHECK(density <= 0.20);

    std::size_t rest_cued = 0, rest_hit = 0;
    for (const auto& m : a.melodies) {
      const auto gpr = baseline_gpr2a(m);
      for (std::size_t t = 1; t < m.size(); ++t) {
        const auto& n = m.notes[t];
        CHECK(n.pitch >= 55);
        CHECK(n.pitch <= 80);
        if (!n.phrase_start) {
          CHECK(std::abs(n.pitch - m.notes[t - 1].pitch) <= 2);
          CHECK(n.gap_after(m.notes[t - 1]) == 0);
        } else if (n.gap_after(m.notes[t - 1]) > 0) {
          ++rest_cued;
          rest_hit += gpr[t];
        } else {
          CHECK(std::abs(n.pitch - m.notes[t - 1].pitch) >= 7);
        }
      }
    }
    CHECK(rest_cued > 0);
    CHECK(rest_hit == rest_cued);

    SynthSpec bad;
    bad.phrase_len_max = 2;
    CHECK_ERROR_CODE(generate_synthetic_corpus(bad, 1), ErrorCode::InvalidSpec);
    bad = {};
    bad.rest_cue_share = 1.5;
    CHECK_ERROR_CODE(generate_synthetic_corpus(bad, 1), ErrorCode::InvalidSpec);
  }

  TEST_CASE("always baseline through cross-validation") {
    const auto corpus = small_synth(60, 5);
    PipelineSpec spec;
    spec.kind = PipelineKind::Always;
    const auto report = run_cv(corpus, spec, 5, 3);
    const auto* row = report.best("Always", 0);
    REQUIRE(row != nullptr);
    const double b = boundary_density(corpus);
    CHECK(std::abs(row->prf.f1 - 2 * b / (1 + b)) < 1e-12);
    CHECK(row->prf.recall == 1.0);
    CHECK(report.rows.size() == 5);
    CHECK_FALSE(report.oracle_threshold);
  }

  TEST_CASE("never and gpr 2a through cross-validation") {
    const auto corpus = small_synth(40, 6);
    PipelineSpec spec;
    spec.kind = PipelineKind::Never;
    const auto never = run_cv(corpus, spec, 4, 1);
    const auto* n = never.best("Never", 0);
    REQUIRE(n != nullptr);
    CHECK(n->counts.tp == corpus.melodies.size());
    CHECK(n->counts.fp == 0);
    CHECK(n->prf.precision == 1.0);

    spec.kind = PipelineKind::Gpr2a;
    const auto gpr = run_cv(corpus, spec, 4, 1);
    const auto* g = gpr.best("GPR 2a", 0);
    REQUIRE(g != nullptr);
    CHECK(g->prf.precision == 1.0);
    CHECK(g->recall_rest == 1.0);
    CHECK(g->recall_no_rest < 1.0);
  }

  TEST_CASE("digram pipelines sweep every k") {
    const auto corpus = small_synth(30, 7);
    PipelineSpec spec;
    spec.kind = PipelineKind::Tp;
    const auto report = run_cv(corpus, spec, 3, 2);
    CHECK(report.rows.size() == 3 * kRawIcKSet.size());
    CHECK(report.aggregates.size() == kRawIcKSet.size());
    CHECK(report.oracle_threshold);
    const auto* best = report.best("TP", 2);
    REQUIRE(best != nullptr);
    for (const auto& a : report.aggregates) {
      CHECK(best->prf.f1 >= a.prf.f1);
      // pooled F1 agrees with the emitted P and R
      const double f = a.prf.precision + a.prf.recall > 0
                           ? 2 * a.prf.precision * a.prf.recall / (a.prf.precision + a.prf.recall)
                           : 0.0;
      CHECK(std::abs(f - a.prf.f1) < 1e-12);
    }
    spec.kind = PipelineKind::Pmi;
    CHECK(run_cv(corpus, spec, 3, 2).best("PMI", 2) != nullptr);
    spec.k_raw.clear();
    CHECK_ERROR_CODE(run_cv(corpus, spec, 3, 2), ErrorCode::EmptyKSet);
  }

  TEST_CASE("rbm pipelines are deterministic across thread counts") {
    const auto corpus = small_synth(12, 8);
    PipelineSpec spec;
    spec.kind = PipelineKind::RbmPseudo;
    spec.n = 2;
    spec.hidden = 6;
    spec.rbm.epochs = 2;
    spec.pretrain.epochs = 2;
    spec.finetune.epochs = 2;
    spec.sampler = {5, 4, 1};
    spec.threads = 1;
    const auto one = run_cv(corpus, spec, 3, 11);
    spec.threads = 4;
    const auto four = run_cv(corpus, spec, 3, 11);
    CHECK(report_rows_csv(one) == report_rows_csv(four));
    CHECK(report_aggregate_csv(one) == report_aggregate_csv(four));
    CHECK(one.best("RBM2", 2) != nullptr);
    CHECK(one.best("RBM2+PS", 2) != nullptr);
    REQUIRE(one.pseudo.size() == 3);
    for (const auto& d : one.pseudo) {
      CHECK(d.log.mse.size() == 3);
      CHECK(d.raised + d.lowered <= d.boundary_notes);
    }
  }

  TEST_CASE("report layout") {
    EvalReport empty;
    const auto table = report_text_table(empty);
    CHECK(table.find("Grouper") < table.find("LBDM"));
    CHECK(table.find("reference (not computed)") != std::string::npos);
    CHECK(table.find("computed\n") == std::string::npos);

    EvalReport two;
    AggregateRow zed{"Zed", 0, std::nullopt, {3, 1, 1}, prf_from_counts({3, 1, 1}), true, 0, 0};
    AggregateRow alpha = zed;
    alpha.model = "Alpha";
    two.aggregates = {zed, alpha};
    two.oracle_threshold = true;
    const auto t2 = report_text_table(two);
    CHECK(t2.find("Alpha") < t2.find("Zed"));
    CHECK(t2.find("oracle") != std::string::npos);
    // P = 3/4 and R = 3/4 are recoverable from the printed counts.
    CHECK(t2.find("0.750") != std::string::npos);

    CHECK(report_rows_csv(empty) == "model,ngram,k,fold,precision,recall,f1\n");
    CHECK(report_f_scores_csv(two) == "ngram,method,f1\n0,Alpha,0.75\n0,Zed,0.75\n");
    CHECK(emit_report(two, ReportFormat::Csv) == report_rows_csv(two));
    CHECK(report_aggregate_csv(two).rfind(
              "model,ngram,k,precision,recall,f1,tp,fp,fn,recall_rest,recall_no_rest,selected\n", 0) ==
          0);
  }

  TEST_CASE("reference rows") {
    const auto& rows = reference_rows();
    REQUIRE(rows.size() == 14);
    CHECK(rows.front().model == "Grouper");
    CHECK(rows.front().f1 == 0.66);
    const auto always = std::find_if(rows.begin(), rows.end(), [](auto& r) { return r.model == "Always"; });
    REQUIRE(always != rows.end());
    CHECK(always->precision == 0.13);
    CHECK(always->f1 == 0.22);
  }
}
