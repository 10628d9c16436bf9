#include "melseg/evalharness.hpp"

#include <algorithm>
#include <tuple>

#include "melseg/error.hpp"
#include "melseg/infocontent.hpp"
#include "melseg/random.hpp"

namespace melseg {

Prf prf_from_counts(const Counts& c) noexcept {
  Prf m;
  const auto predicted = c.tp + c.fp;
  const auto actual = c.tp + c.fn;
  m.precision = predicted == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(predicted);
  m.recall = actual == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(actual);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

Counts count_matches(const std::vector<std::vector<std::uint8_t>>& pred,
                     const std::vector<std::vector<std::uint8_t>>& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(pred.size()) + " predicted vs " +
                                               std::to_string(truth.size()) + " true melodies");
  }
  Counts c;
  for (std::size_t m = 0; m < pred.size(); ++m) {
    if (pred[m].size() != truth[m].size()) {
      throw Error(ErrorCode::LengthMismatch, "melody " + std::to_string(m) + ": " +
                                                 std::to_string(pred[m].size()) + " vs " +
                                                 std::to_string(truth[m].size()) + " notes");
    }
    for (std::size_t i = 0; i < pred[m].size(); ++i) {
      const bool p = pred[m][i] != 0;
      const bool t = truth[m][i] != 0;
      c.tp += p && t;
      c.fp += p && !t;
      c.fn += !p && t;
    }
  }
  return c;
}

Prf prf1(const std::vector<std::vector<std::uint8_t>>& pred,
         const std::vector<std::vector<std::uint8_t>>& truth) {
  return prf_from_counts(count_matches(pred, truth));
}

int FoldPlan::fold_of(const std::string& melody_id) const {
  const auto it = assignment.find(melody_id);
  if (it == assignment.end()) {
    throw Error(ErrorCode::InvalidConfig, "melody '" + melody_id + "' is not in the fold plan");
  }
  return it->second;
}

FoldPlan make_fold_plan(const Corpus& corpus, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidConfig, "need at least 2 folds");
  if (corpus.melodies.size() < static_cast<std::size_t>(folds)) {
    throw Error(ErrorCode::FoldTooSmall, std::to_string(corpus.melodies.size()) +
                                             " melodies cannot fill " + std::to_string(folds) +
                                             " folds");
  }
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  ranked.reserve(corpus.melodies.size());
  for (const auto& m : corpus.melodies) {
    ranked.emplace_back(derive_key({seed, hash_string(m.id)}), m.id);
  }
  std::sort(ranked.begin(), ranked.end());
  FoldPlan plan;
  plan.folds = folds;
  plan.seed = seed;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    plan.assignment[ranked[i].second] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return plan;
}

Corpus fold_subset(const Corpus& corpus, const FoldPlan& plan, int fold, bool invert) {
  Corpus out;
  out.source = corpus.source;
  for (const auto& m : corpus.melodies) {
    if ((plan.fold_of(m.id) == fold) != invert) out.melodies.push_back(m);
  }
  return out;
}

std::string to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::Rbm: return "rbm";
    case PipelineKind::RbmPseudo: return "rbm+ps";
    case PipelineKind::Always: return "baseline:always";
    case PipelineKind::Never: return "baseline:never";
    case PipelineKind::Gpr2a: return "baseline:gpr2a";
    case PipelineKind::Tp: return "baseline:tp";
    case PipelineKind::Pmi: return "baseline:pmi";
  }
  return "unknown";
}

PipelineKind pipeline_from_string(const std::string& name) {
  for (auto k : {PipelineKind::Rbm, PipelineKind::RbmPseudo, PipelineKind::Always,
                 PipelineKind::Never, PipelineKind::Gpr2a, PipelineKind::Tp, PipelineKind::Pmi}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown pipeline '" + name + "'");
}

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows{
      {"Grouper", 0.71, 0.62, 0.66},     {"LBDM", 0.70, 0.60, 0.63},
      {"RBM10+DO+PS", 0.80, 0.55, 0.63}, {"RBM10+DO", 0.78, 0.53, 0.61},
      {"RBM10", 0.83, 0.50, 0.60},       {"IDyOM", 0.76, 0.50, 0.58},
      {"GPR 2a", 0.99, 0.45, 0.58},      {"GPR 2b", 0.47, 0.42, 0.39},
      {"GPR 3a", 0.29, 0.46, 0.35},      {"GPR 3d", 0.66, 0.22, 0.31},
      {"PMI", 0.16, 0.32, 0.21},         {"TP", 0.17, 0.19, 0.17},
      {"Always", 0.13, 1.00, 0.22},      {"Never", 0.00, 0.00, 0.00},
  };
  return rows;
}

void EvalReport::merge(EvalReport other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  aggregates.insert(aggregates.end(), other.aggregates.begin(), other.aggregates.end());
  pseudo.insert(pseudo.end(), other.pseudo.begin(), other.pseudo.end());
  oracle_threshold = oracle_threshold || other.oracle_threshold;
}

const AggregateRow* EvalReport::best(const std::string& model, int ngram) const {
  for (const auto& a : aggregates) {
    if (a.model == model && a.ngram == ngram && a.selected) return &a;
  }
  return nullptr;
}

namespace {

using Boundaries = std::vector<std::vector<std::uint8_t>>;

// Predictions of one model on one fold, either fixed or one set per k.
struct FoldOutput {
  int fold = 0;
  Boundaries truth;
  std::vector<std::vector<bool>> rest;  // per note: preceded by a rest
  std::vector<std::optional<double>> ks;
  std::vector<Boundaries> predictions;  // aligned with ks
};

FoldOutput make_fold_output(int fold, const Corpus& test) {
  FoldOutput out;
  out.fold = fold;
  for (const auto& m : test.melodies) {
    out.truth.push_back(boundary_vector(m));
    std::vector<bool> rest(m.size(), false);
    for (std::size_t t = 1; t < m.size(); ++t) rest[t] = m.notes[t].gap_after(m.notes[t - 1]) > 0;
    out.rest.push_back(std::move(rest));
  }
  return out;
}

void add_fixed(FoldOutput& out, Boundaries pred) {
  out.ks.push_back(std::nullopt);
  out.predictions.push_back(std::move(pred));
}

void add_profiles(FoldOutput& out, const std::vector<Bsp>& profiles,
                  const std::vector<double>& ks, VarianceFormula variance) {
  if (ks.empty()) throw Error(ErrorCode::EmptyKSet, "no k values to sweep");
  for (double k : ks) {
    Boundaries pred;
    pred.reserve(profiles.size());
    for (const auto& p : profiles) pred.push_back(pick_boundaries(p, {k, variance}));
    out.ks.push_back(k);
    out.predictions.push_back(std::move(pred));
  }
}

// Adds fold rows and pooled aggregates for one model to the report.
void summarize(EvalReport& report, const std::string& model, int ngram,
               const std::vector<FoldOutput>& folds) {
  if (folds.empty()) return;
  const auto n_k = folds.front().ks.size();
  std::vector<AggregateRow> rows(n_k);
  for (std::size_t ki = 0; ki < n_k; ++ki) {
    auto& agg = rows[ki];
    agg.model = model;
    agg.ngram = ngram;
    agg.k = folds.front().ks[ki];
    std::uint64_t rest_total = 0, rest_hit = 0, plain_total = 0, plain_hit = 0;
    for (const auto& f : folds) {
      const auto c = count_matches(f.predictions[ki], f.truth);
      report.rows.push_back({model, ngram, agg.k, f.fold, c, prf_from_counts(c)});
      agg.counts += c;
      for (std::size_t m = 0; m < f.truth.size(); ++m) {
        for (std::size_t i = 0; i < f.truth[m].size(); ++i) {
          if (!f.truth[m][i]) continue;
          const bool hit = f.predictions[ki][m][i] != 0;
          if (f.rest[m][i]) {
            ++rest_total;
            rest_hit += hit;
          } else {
            ++plain_total;
            plain_hit += hit;
          }
        }
      }
    }
    agg.prf = prf_from_counts(agg.counts);
    agg.recall_rest = rest_total ? static_cast<double>(rest_hit) / rest_total : 0.0;
    agg.recall_no_rest = plain_total ? static_cast<double>(plain_hit) / plain_total : 0.0;
  }
  std::size_t best = 0;
  for (std::size_t ki = 1; ki < n_k; ++ki) {
    const bool better = rows[ki].prf.f1 > rows[best].prf.f1 ||
                        (rows[ki].prf.f1 == rows[best].prf.f1 && rows[ki].k && rows[best].k &&
                         *rows[ki].k < *rows[best].k);
    if (better) best = ki;
  }
  rows[best].selected = true;
  report.aggregates.insert(report.aggregates.end(), rows.begin(), rows.end());
}

std::string model_label(PipelineKind kind, int n) {
  switch (kind) {
    case PipelineKind::Rbm: return "RBM" + std::to_string(n);
    case PipelineKind::RbmPseudo: return "RBM" + std::to_string(n) + "+PS";
    case PipelineKind::Always: return "Always";
    case PipelineKind::Never: return "Never";
    case PipelineKind::Gpr2a: return "GPR 2a";
    case PipelineKind::Tp: return "TP";
    case PipelineKind::Pmi: return "PMI";
  }
  return "?";
}

}  // namespace

EvalReport run_cv(const Corpus& corpus, const PipelineSpec& spec, int folds,
                  std::uint64_t master_seed) {
  if (corpus.melodies.empty()) throw Error(ErrorCode::EmptyCorpus, "nothing to evaluate");
  if (spec.n < 1) throw Error(ErrorCode::InvalidConfig, "n-gram length must be >= 1");
  const auto plan = make_fold_plan(corpus, folds, master_seed);

  const bool uses_rbm = spec.kind == PipelineKind::Rbm || spec.kind == PipelineKind::RbmPseudo;
  const bool digram = spec.kind == PipelineKind::Tp || spec.kind == PipelineKind::Pmi;
  const int ngram = uses_rbm ? spec.n : (digram ? 2 : 0);

  std::vector<FoldOutput> primary;
  std::vector<FoldOutput> smoothed;
  EvalReport report;
  report.oracle_threshold = uses_rbm || digram;

  for (int fold = 0; fold < folds; ++fold) {
    const auto test = fold_subset(corpus, plan, fold, false);
    const auto train = fold_subset(corpus, plan, fold, true);
    auto out = make_fold_output(fold, test);
    const auto fold_key = static_cast<std::uint64_t>(fold);

    switch (spec.kind) {
      case PipelineKind::Always:
      case PipelineKind::Never:
      case PipelineKind::Gpr2a: {
        Boundaries pred;
        for (const auto& m : test.melodies) {
          pred.push_back(spec.kind == PipelineKind::Always  ? baseline_always(m)
                         : spec.kind == PipelineKind::Never ? baseline_never(m)
                                                            : baseline_gpr2a(m));
        }
        add_fixed(out, std::move(pred));
        break;
      }
      case PipelineKind::Tp:
      case PipelineKind::Pmi: {
        const auto stats = build_digram_stats(train, spec.viewpoints);
        const auto method = spec.kind == PipelineKind::Tp
                                ? DigramMethod::TransitionProbability
                                : DigramMethod::PointwiseMutualInformation;
        add_profiles(out, baseline_digram(stats, test, method), spec.k_raw, spec.variance);
        break;
      }
      case PipelineKind::Rbm:
      case PipelineKind::RbmPseudo: {
        SamplerConfig sampler = spec.sampler;
        sampler.seed = derive_key({master_seed, fold_key, 0x73616D70ULL});
        TrainConfig rbm_cfg = spec.rbm;
        rbm_cfg.seed = derive_key({master_seed, fold_key, 0x72626D00ULL});

        const auto train_batch =
            encode_corpus(train, spec.n, spec.viewpoints, sampler.seed, spec.threads);
        const auto rbm = train_fpcd(train_batch, rbm_cfg, spec.hidden).model;
        const auto raw = bsp_for_corpus(rbm, test, spec.n, sampler, spec.threads);
        add_profiles(out, raw, spec.k_raw, spec.variance);

        if (spec.kind == PipelineKind::RbmPseudo) {
          const auto targets = make_pseudo_targets(rbm, train, spec.n, sampler, spec.threads);
          TrainConfig pre_cfg = spec.pretrain;
          pre_cfg.seed = derive_key({master_seed, fold_key, 0x70726500ULL});
          const auto pre = pretrain_hidden(train_batch, spec.hidden, pre_cfg);
          auto net = ffnn_from_rbm(pre, derive_key({master_seed, fold_key, 0x6E657400ULL}),
                                   spec.extra_hidden);
          net.source_rbm_id = targets.source_model_id;
          FinetuneConfig ft = spec.finetune;
          ft.seed = derive_key({master_seed, fold_key, 0x66740000ULL});
          auto tuned = finetune(net, train_batch.rows, targets.targets, ft);
          const auto smooth = smoothed_bsp_for_corpus(tuned.model, test, spec.n, sampler.seed);

          PseudoDiagnostics diag;
          diag.fold = fold;
          diag.log = std::move(tuned.log);
          for (std::size_t m = 0; m < test.melodies.size(); ++m) {
            for (std::size_t i = 1; i < test.melodies[m].size(); ++i) {
              if (!test.melodies[m].notes[i].phrase_start) continue;
              ++diag.boundary_notes;
              diag.raised += smooth[m].values[i] > raw[m].values[i];
              diag.lowered += smooth[m].values[i] < raw[m].values[i];
            }
          }
          report.pseudo.push_back(std::move(diag));

          auto sm = make_fold_output(fold, test);
          add_profiles(sm, smooth, spec.k_smoothed, spec.variance);
          smoothed.push_back(std::move(sm));
        }
        break;
      }
    }
    primary.push_back(std::move(out));
  }

  const auto primary_kind = spec.kind == PipelineKind::RbmPseudo ? PipelineKind::Rbm : spec.kind;
  summarize(report, model_label(primary_kind, spec.n), ngram, primary);
  if (!smoothed.empty()) {
    summarize(report, model_label(PipelineKind::RbmPseudo, spec.n), ngram, smoothed);
  }
  return report;
}

}  // namespace melseg
