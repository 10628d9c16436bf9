#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "melseg/baselines.hpp"
#include "melseg/corpus.hpp"
#include "melseg/metrics.hpp"
#include "melseg/peakpick.hpp"
#include "melseg/pseudosup.hpp"
#include "melseg/rbm.hpp"
#include "melseg/sampler.hpp"

namespace melseg {

// Melody -> fold assignment. Melodies are ranked by a seeded hash of their id
// and dealt round-robin, so the plan depends only on the set of ids and the
// seed (not on corpus order) and every fold is non-empty.
struct FoldPlan {
  int folds = 5;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment;

  int fold_of(const std::string& melody_id) const;
};

FoldPlan make_fold_plan(const Corpus& corpus, int folds, std::uint64_t seed);

// Melodies of `corpus` in (or, with invert, outside) `fold`, in corpus order.
Corpus fold_subset(const Corpus& corpus, const FoldPlan& plan, int fold, bool invert);

enum class PipelineKind { Rbm, RbmPseudo, Always, Never, Gpr2a, Tp, Pmi };

std::string to_string(PipelineKind kind);
PipelineKind pipeline_from_string(const std::string& name);

struct PipelineSpec {
  PipelineKind kind = PipelineKind::Rbm;
  int n = 3;
  int hidden = 200;
  ViewpointConfig viewpoints;
  TrainConfig rbm;
  SamplerConfig sampler;
  TrainConfig pretrain = pretrain_defaults();
  FinetuneConfig finetune;
  int extra_hidden = 0;
  std::vector<double> k_raw = kRawIcKSet;
  std::vector<double> k_smoothed = kSmoothedKSet;
  VarianceFormula variance = VarianceFormula::AsPrinted;
  unsigned threads = 1;
};

// One (model, n, k, fold) evaluation.
struct FoldMetrics {
  std::string model;
  int ngram = 0;
  std::optional<double> k;
  int fold = 0;
  Counts counts;
  Prf prf;
};

// Counts pooled over all folds for one (model, n, k).
struct AggregateRow {
  std::string model;
  int ngram = 0;
  std::optional<double> k;
  Counts counts;
  Prf prf;
  bool selected = false;  // the k that maximizes pooled F1 for this model and n
  // Recall split by whether the true boundary note follows a rest.
  double recall_rest = 0.0;
  double recall_no_rest = 0.0;
};

struct ReferenceRow {
  std::string model;
  double precision;
  double recall;
  double f1;
};

// Fixed comparison figures printed next to computed rows; never recomputed.
const std::vector<ReferenceRow>& reference_rows();

struct PseudoDiagnostics {
  int fold = 0;
  FinetuneLog log;
  std::size_t boundary_notes = 0;  // ground-truth boundaries in the test fold (note 0 excluded)
  std::size_t raised = 0;          // smoothed IC > raw IC
  std::size_t lowered = 0;         // smoothed IC < raw IC
};

struct EvalReport {
  std::vector<FoldMetrics> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<PseudoDiagnostics> pseudo;
  bool oracle_threshold = false;  // k chosen on the evaluated output

  void merge(EvalReport other);
  // The selected aggregate row for a model at an n-gram length.
  const AggregateRow* best(const std::string& model, int ngram) const;
};

// Per fold: train on the other folds, profile and segment the held-out fold;
// for profile-based models every k in the relevant set is evaluated and the
// k maximizing pooled F1 is marked selected.
EvalReport run_cv(const Corpus& corpus, const PipelineSpec& spec, int folds,
                  std::uint64_t master_seed);

// Synthetic folk-like corpus with planted phrase starts.
struct SynthSpec {
  int melodies = 200;
  int phrases_min = 4;
  int phrases_max = 8;
  int phrase_len_min = 5;
  int phrase_len_max = 12;
  int max_step = 2;            // |interval| within a phrase, semitones
  double rest_cue_share = 0.6; // remaining boundaries are cued by a leap
  int rest_min = 2;            // ticks
  int rest_max = 6;
  int leap_min = 7;            // semitones
  int pitch_min = 55;
  int pitch_max = 80;

  void validate() const;
};

Corpus generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed);

enum class ReportFormat { Csv, TextTable };

// Per-(model, n, k, fold) rows: header model,ngram,k,fold,precision,recall,f1.
std::string report_rows_csv(const EvalReport& report);
// Pooled rows for every k, with counts and the selected flag.
std::string report_aggregate_csv(const EvalReport& report);
// Best F1 per (n, method): header ngram,method,f1.
std::string report_f_scores_csv(const EvalReport& report);
// Selected rows plus reference rows, ordered by F1 desc then name asc.
std::string report_text_table(const EvalReport& report);
std::string emit_report(const EvalReport& report, ReportFormat format);

}  // namespace melseg
