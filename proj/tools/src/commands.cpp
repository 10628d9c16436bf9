#include "melseg_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <ostream>

#include "melseg/io.hpp"
#include "melseg/random.hpp"

namespace melseg::cli {

namespace {

constexpr std::uint64_t kTrainTag = hash_string("train");
constexpr std::uint64_t kSamplerTag = hash_string("sampler");
constexpr std::uint64_t kPretrainTag = hash_string("pretrain");
constexpr std::uint64_t kNetTag = hash_string("ffnn-init");
constexpr std::uint64_t kFinetuneTag = hash_string("finetune");

SamplerConfig sampler_for(const RunConfig& cfg) {
  SamplerConfig s = cfg.pipeline.sampler;
  s.seed = derive_key({cfg.seed, kSamplerTag});
  return s;
}

RbmModel load_ngram_model(const fs::path& path) {
  auto rbm = load_rbm(path);
  if (rbm.n < 1) {
    throw Error(ErrorCode::ConfigMismatch, path.string() + " does not record an n-gram length");
  }
  return rbm;
}

}  // namespace

void cmd_train(const RunConfig& cfg, const fs::path& corpus_path, const fs::path& out,
               std::ostream& log) {
  const auto corpus = load_corpus(corpus_path);
  const auto& p = cfg.pipeline;
  const auto batch =
      encode_corpus(corpus, p.n, p.viewpoints, sampler_for(cfg).seed, p.threads);
  TrainConfig tc = p.rbm;
  tc.seed = derive_key({cfg.seed, kTrainTag});
  log << "training " << p.hidden << "-unit RBM on " << batch.rows.rows() << " " << p.n
      << "-grams\n";
  const auto result = train_fpcd(batch, tc, p.hidden);
  save_rbm(result.model, out);
}

void cmd_ic(const RunConfig& cfg, const fs::path& model, const fs::path& corpus_path,
            const fs::path& out) {
  const auto rbm = load_ngram_model(model);
  const auto corpus = load_corpus(corpus_path);
  const auto profiles =
      bsp_for_corpus(rbm, corpus, rbm.n, sampler_for(cfg), cfg.pipeline.threads);
  write_text_file_atomic(out, bsp_to_csv(profiles));
}

void cmd_pseudo(const RunConfig& cfg, const fs::path& model, const fs::path& corpus_path,
                const fs::path& out, const fs::path& bsp_out, std::ostream& log) {
  const auto rbm = load_ngram_model(model);
  const auto corpus = load_corpus(corpus_path);
  const auto& p = cfg.pipeline;
  const auto sampler = sampler_for(cfg);

  const auto targets = make_pseudo_targets(rbm, corpus, rbm.n, sampler, p.threads);
  const auto batch = encode_corpus(corpus, rbm.n, rbm.viewpoints, sampler.seed, p.threads);
  TrainConfig pre_cfg = p.pretrain;
  pre_cfg.seed = derive_key({cfg.seed, kPretrainTag});
  const auto pre = pretrain_hidden(batch, rbm.hidden(), pre_cfg);
  auto net = ffnn_from_rbm(pre, derive_key({cfg.seed, kNetTag}), p.extra_hidden);
  net.source_rbm_id = targets.source_model_id;

  FinetuneConfig ft = p.finetune;
  ft.seed = derive_key({cfg.seed, kFinetuneTag});
  auto tuned = finetune(net, batch.rows, targets.targets, ft);
  if (!tuned.log.mse.empty()) {
    log << "fine-tune MSE " << tuned.log.mse.front() << " -> " << tuned.log.mse.back() << "\n";
  }
  save_ffnn(tuned.model, out);
  write_text_file_atomic(bsp_out,
                         bsp_to_csv(smoothed_bsp_for_corpus(tuned.model, corpus, rbm.n,
                                                            sampler.seed)));
}

void cmd_segment(const fs::path& bsp, double k, VarianceFormula variance, const fs::path& out) {
  const auto profiles = bsp_from_csv(read_text_file(bsp));
  std::vector<Segmentation> segs;
  for (const auto& prof : profiles) {
    segs.push_back({prof.melody_id, pick_boundaries(prof, {k, variance})});
  }
  write_text_file_atomic(out, segmentation_to_csv(segs));
}

void cmd_baseline(const RunConfig& cfg, const std::string& method, const fs::path& corpus_path,
                  const fs::path& train_corpus, const fs::path& out) {
  const auto corpus = load_corpus(corpus_path);
  if (method == "always" || method == "never" || method == "gpr2a") {
    std::vector<Segmentation> segs;
    for (const auto& m : corpus.melodies) {
      segs.push_back({m.id, method == "always"  ? baseline_always(m)
                            : method == "never" ? baseline_never(m)
                                                : baseline_gpr2a(m)});
    }
    write_text_file_atomic(out, segmentation_to_csv(segs));
    return;
  }
  if (method != "tp" && method != "pmi") {
    throw ValidationError("unknown baseline method '" + method + "'");
  }
  const auto stats = build_digram_stats(
      train_corpus.empty() ? corpus : load_corpus(train_corpus), cfg.pipeline.viewpoints);
  const auto kind = method == "tp" ? DigramMethod::TransitionProbability
                                   : DigramMethod::PointwiseMutualInformation;
  write_text_file_atomic(out, bsp_to_csv(baseline_digram(stats, corpus, kind)));
}

NgramRange parse_ngram_range(const std::string& text) {
  auto parse = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
      throw ValidationError("bad --ngram-range '" + text + "' (expected a..b with 1 <= a <= b)");
    }
    return v;
  };
  const auto dots = text.find("..");
  NgramRange r;
  if (dots == std::string::npos) {
    r.lo = r.hi = parse(text);
  } else {
    r.lo = parse(std::string_view(text).substr(0, dots));
    r.hi = parse(std::string_view(text).substr(dots + 2));
  }
  if (r.lo > r.hi) throw ValidationError("bad --ngram-range '" + text + "' (a > b)");
  return r;
}

void cmd_cv(const RunConfig& cfg, const fs::path& corpus_path, const std::string& pipeline,
            NgramRange range, const fs::path& out_dir, std::ostream& log) {
  PipelineSpec spec = cfg.pipeline;
  try {
    spec.kind = pipeline_from_string(pipeline);
  } catch (const Error& e) {
    throw ValidationError(e.message());
  }
  const auto corpus = load_corpus(corpus_path);
  const bool per_n = spec.kind == PipelineKind::Rbm || spec.kind == PipelineKind::RbmPseudo;
  if (!per_n) range.hi = range.lo;

  EvalReport report;
  for (int n = range.lo; n <= range.hi; ++n) {
    spec.n = n;
    if (per_n) log << "cross-validating " << pipeline << " at n=" << n << "\n";
    report.merge(run_cv(corpus, spec, cfg.folds, cfg.seed));
  }

  write_text_file_atomic(out_dir / "rows.csv", report_rows_csv(report));
  write_text_file_atomic(out_dir / "aggregate.csv", report_aggregate_csv(report));
  write_text_file_atomic(out_dir / "f_scores.csv", report_f_scores_csv(report));
  write_text_file_atomic(out_dir / "report.txt", report_text_table(report));

  if (!report.pseudo.empty()) {
    std::string diag = "fold,boundary_notes,raised,lowered\n";
    std::string curve = "fold,epoch,mse,beta,entropy\n";
    for (const auto& d : report.pseudo) {
      diag += std::to_string(d.fold) + "," + std::to_string(d.boundary_notes) + "," +
              std::to_string(d.raised) + "," + std::to_string(d.lowered) + "\n";
      for (std::size_t e = 0; e < d.log.mse.size(); ++e) {
        curve += std::to_string(d.fold) + "," + std::to_string(e) + "," +
                 format_double(d.log.mse[e]) + "," + format_double(d.log.beta[e]) + "," +
                 format_double(d.log.entropy[e]) + "\n";
      }
    }
    write_text_file_atomic(out_dir / "pseudo_diagnostics.csv", diag);
    write_text_file_atomic(out_dir / "finetune_log.csv", curve);
  }

  // The resolved configuration, minus the thread count, so that reports made
  // with different --threads stay byte-identical.
  auto doc = nlohmann::json::parse(run_config_to_json(cfg));
  doc.erase("threads");
  doc["pipeline"] = pipeline;
  doc["ngram_range"] = std::to_string(range.lo) + ".." + std::to_string(range.hi);
  write_text_file_atomic(out_dir / "config.json", doc.dump(2) + "\n");
}

void cmd_synth(const fs::path& spec_path, std::uint64_t seed, const fs::path& out_dir) {
  SynthSpec spec;
  if (!spec_path.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text_file(spec_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(spec_path.string() + ": not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(spec_path.string() + ": expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
      auto set_int = [&](int& dst) {
        if (!value.is_number_integer()) {
          throw ValidationError(spec_path.string() + ": '" + key + "' must be an integer");
        }
        dst = value.get<int>();
      };
      if (key == "melodies") set_int(spec.melodies);
      else if (key == "phrases_min") set_int(spec.phrases_min);
      else if (key == "phrases_max") set_int(spec.phrases_max);
      else if (key == "phrase_len_min") set_int(spec.phrase_len_min);
      else if (key == "phrase_len_max") set_int(spec.phrase_len_max);
      else if (key == "max_step") set_int(spec.max_step);
      else if (key == "rest_min") set_int(spec.rest_min);
      else if (key == "rest_max") set_int(spec.rest_max);
      else if (key == "leap_min") set_int(spec.leap_min);
      else if (key == "pitch_min") set_int(spec.pitch_min);
      else if (key == "pitch_max") set_int(spec.pitch_max);
      else if (key == "rest_cue_share") {
        if (!value.is_number()) {
          throw ValidationError(spec_path.string() + ": 'rest_cue_share' must be a number");
        }
        spec.rest_cue_share = value.get<double>();
      } else {
        throw ValidationError(spec_path.string() + ": unknown synth spec key '" + key + "'");
      }
    }
  }
  write_corpus(generate_synthetic_corpus(spec, seed), out_dir);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_plot_svg(const Melody& melody, const Bsp& bsp,
                            const std::vector<std::uint8_t>& truth,
                            const std::vector<std::uint8_t>* pred) {
  const double width = 960, left = 50, right = 20;
  const double roll_top = 30, roll_h = 110, curve_top = 170, curve_h = 220;
  const double height = curve_top + curve_h + 40;
  const std::size_t count = bsp.size();
  const double step = (width - left - right) / static_cast<double>(std::max<std::size_t>(count, 1));
  auto x_of = [&](std::size_t i) { return left + step * (static_cast<double>(i) + 0.5); };

  int lo = 127, hi = 0;
  for (const auto& n : melody.notes) {
    lo = std::min(lo, n.pitch);
    hi = std::max(hi, n.pitch);
  }
  const double pitch_span = std::max(1, hi - lo + 1);
  double ic_max = 0.0;
  for (double v : bsp.values) ic_max = std::max(ic_max, v);
  if (ic_max <= 0.0) ic_max = 1.0;
  auto y_of = [&](double v) { return curve_top + curve_h - curve_h * v / ic_max; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(left) + "\" y=\"18\" font-size=\"13\">" + bsp.melody_id + "</text>\n";

  // piano-roll strip, one column per note
  s += "<g id=\"piano-roll\">\n";
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(roll_top) + "\" width=\"" +
       num(width - left - right) + "\" height=\"" + num(roll_h) +
       "\" fill=\"none\" stroke=\"#999\"/>\n";
  const double row_h = roll_h / pitch_span;
  for (std::size_t i = 0; i < melody.size(); ++i) {
    const double y = roll_top + roll_h - row_h * (melody.notes[i].pitch - lo + 1);
    s += "<rect x=\"" + num(x_of(i) - step * 0.4) + "\" y=\"" + num(y) + "\" width=\"" +
         num(step * 0.8) + "\" height=\"" + num(std::max(row_h, 1.5)) + "\" fill=\"#345\"/>\n";
  }
  s += "</g>\n";

  // truth bars and predictions behind the curve
  s += "<g id=\"truth\">\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i]) continue;
    s += "<rect x=\"" + num(x_of(i) - step * 0.3) + "\" y=\"" + num(curve_top) + "\" width=\"" +
         num(step * 0.6) + "\" height=\"" + num(curve_h) + "\" fill=\"#f4c542\" opacity=\"0.5\"/>\n";
  }
  s += "</g>\n";
  if (pred) {
    s += "<g id=\"predicted\">\n";
    for (std::size_t i = 0; i < pred->size(); ++i) {
      if (!(*pred)[i]) continue;
      s += "<line x1=\"" + num(x_of(i)) + "\" x2=\"" + num(x_of(i)) + "\" y1=\"" +
           num(curve_top) + "\" y2=\"" + num(curve_top + curve_h) +
           "\" stroke=\"#c0392b\" stroke-dasharray=\"5,4\"/>\n";
    }
    s += "</g>\n";
  }

  s += "<g id=\"bsp\">\n<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < count; ++i) {
    s += (i ? " " : "") + num(x_of(i)) + "," + num(y_of(bsp.values[i]));
  }
  s += "\"/>\n</g>\n";

  s += "<line x1=\"" + num(left) + "\" x2=\"" + num(width - right) + "\" y1=\"" +
       num(curve_top + curve_h) + "\" y2=\"" + num(curve_top + curve_h) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(left) + "\" x2=\"" + num(left) + "\" y1=\"" + num(curve_top) +
       "\" y2=\"" + num(curve_top + curve_h) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(curve_top + 4) +
       "\" text-anchor=\"end\">" + num(ic_max) + "</text>\n";
  s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(curve_top + curve_h) +
       "\" text-anchor=\"end\">0</text>\n";
  s += "<text x=\"" + num(width / 2) + "\" y=\"" + num(height - 10) +
       "\" text-anchor=\"middle\">note index</text>\n";
  s += "<text x=\"14\" y=\"" + num(curve_top + curve_h / 2) +
       "\" transform=\"rotate(-90 14 " + num(curve_top + curve_h / 2) +
       ")\" text-anchor=\"middle\">boundary strength (bits)</text>\n";
  s += "</svg>\n";
  return s;
}

void cmd_plot(const fs::path& bsp_path, const std::string& melody_id, const fs::path& truth_path,
              const fs::path& pred_path, const fs::path& out) {
  const auto melody = load_melody(truth_path);
  const std::string id = melody_id.empty() ? melody.id : melody_id;
  const auto profiles = bsp_from_csv(read_text_file(bsp_path));
  const auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const Bsp& b) { return b.melody_id == id; });
  if (it == profiles.end()) {
    throw ValidationError(bsp_path.string() + ": no profile for melody '" + id + "'");
  }
  if (it->size() != melody.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "profile of '" + id + "' has " + std::to_string(it->size()) + " values but " +
                    truth_path.string() + " has " + std::to_string(melody.size()) + " notes");
  }
  const auto truth = boundary_vector(melody);

  std::vector<std::uint8_t> pred;
  const bool have_pred = !pred_path.empty();
  if (have_pred) {
    const auto segs = segmentation_from_csv(read_text_file(pred_path));
    const auto s = std::find_if(segs.begin(), segs.end(),
                                [&](const Segmentation& g) { return g.melody_id == id; });
    if (s == segs.end()) {
      throw ValidationError(pred_path.string() + ": no segmentation for melody '" + id + "'");
    }
    if (s->boundaries.size() != melody.size()) {
      throw Error(ErrorCode::LengthMismatch, pred_path.string() + ": segmentation of '" + id +
                                                 "' does not match the melody length");
    }
    pred = s->boundaries;
  }

  std::string data = "note_index,onset_16th,duration_16th,midi_pitch,ic,truth,pred\n";
  for (std::size_t i = 0; i < melody.size(); ++i) {
    const auto& n = melody.notes[i];
    data += std::to_string(i) + "," + std::to_string(n.onset) + "," + std::to_string(n.duration) +
            "," + std::to_string(n.pitch) + "," + format_double(it->values[i]) + "," +
            std::to_string(truth[i]) + "," + (have_pred ? std::to_string(pred[i]) : "") + "\n";
  }
  auto data_path = out;
  data_path.replace_extension(".csv");
  if (data_path == out) data_path += ".data.csv";
  write_text_file_atomic(data_path, data);
  write_text_file_atomic(out, render_plot_svg(melody, *it, truth, have_pred ? &pred : nullptr));
}

}  // namespace melseg::cli
