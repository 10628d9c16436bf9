#include "melseg_cli/app.hpp"

#include <CLI11.hpp>
#include <optional>
#include <ostream>

#include "melseg_cli/commands.hpp"

namespace melseg::cli {

namespace {

// Input problems (malformed files, bad values) are the user's to fix; the
// rest are failures while running.
bool is_validation(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader:
    case ErrorCode::NonIntegerField:
    case ErrorCode::NonMonotoneOnset:
    case ErrorCode::OverlappingNotes:
    case ErrorCode::EmptyMelody:
    case ErrorCode::FirstNoteNotPhraseStart:
    case ErrorCode::InvalidNote:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::DuplicateId:
    case ErrorCode::ConfigMismatch:
    case ErrorCode::EmptyBsp:
    case ErrorCode::EmptyKSet:
    case ErrorCode::LengthMismatch:
    case ErrorCode::FoldTooSmall:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidConfig:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

// Options shared by the commands that read a RunConfig.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "flat JSON run config (keys: see `melseg --help`)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed; overrides MELSEG_SEED and the config")
      ->default_str("config seed");
  cmd->add_option("--threads", c.threads, "worker threads; outputs do not depend on it")
      ->check(CLI::PositiveNumber)
      ->default_str("config threads");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? default_run_config() : load_run_config(c.config);
  cfg.seed = resolve_seed(cfg, c.seed ? &*c.seed : nullptr);
  if (c.threads) cfg.pipeline.threads = *c.threads;
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"melseg: melodic phrase segmentation from RBM information content", "melseg"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.footer("Run-config keys (flat JSON; defaults shown):\n" + run_config_key_help() +
             "\nExit codes: 0 success, 1 invalid input or config, 2 runtime failure.\n"
             "Seed precedence: --seed, then MELSEG_SEED, then the config 'seed' key.");

  const RunConfig defaults = default_run_config();
  std::function<void()> action;

  // train
  Common train_c;
  std::string train_corpus, train_out;
  std::optional<int> train_n;
  auto* train = app.add_subcommand("train", "train an RBM on the n-grams of a corpus");
  train->add_option("--corpus", train_corpus, "corpus directory or manifest")
      ->required()
      ->check(CLI::ExistingPath);
  train->add_option("--ngram", train_n, "n-gram length")->default_str(std::to_string(defaults.pipeline.n));
  train->add_option("--out", train_out, "model file to write")->required();
  add_common(train, train_c);
  train->callback([&] {
    action = [&] {
      auto cfg = resolve(train_c);
      if (train_n) cfg.pipeline.n = *train_n;
      validate_run_config(cfg);
      cmd_train(cfg, train_corpus, train_out, err);
    };
  });

  // ic
  Common ic_c;
  std::string ic_model, ic_corpus, ic_out;
  auto* ic = app.add_subcommand("ic", "write per-note information content (boundary strength)");
  ic->add_option("--model", ic_model, "RBM model file")->required()->check(CLI::ExistingFile);
  ic->add_option("--corpus", ic_corpus, "corpus directory or manifest")
      ->required()
      ->check(CLI::ExistingPath);
  ic->add_option("--out", ic_out, "profile CSV to write")->required();
  add_common(ic, ic_c);
  ic->callback([&] { action = [&] { cmd_ic(resolve(ic_c), ic_model, ic_corpus, ic_out); }; });

  // pseudo
  Common ps_c;
  std::string ps_model, ps_corpus, ps_out, ps_bsp;
  auto* pseudo = app.add_subcommand("pseudo", "fine-tune a network on RBM information content");
  pseudo->add_option("--model", ps_model, "RBM model file")->required()->check(CLI::ExistingFile);
  pseudo->add_option("--corpus", ps_corpus, "training corpus")
      ->required()
      ->check(CLI::ExistingPath);
  pseudo->add_option("--out", ps_out, "network file to write")->required();
  pseudo->add_option("--bsp-out", ps_bsp, "smoothed profile CSV")->default_str("<out>.bsp.csv");
  add_common(pseudo, ps_c);
  pseudo->callback([&] {
    action = [&] {
      std::string bsp = ps_bsp.empty() ? ps_out + ".bsp.csv" : ps_bsp;
      cmd_pseudo(resolve(ps_c), ps_model, ps_corpus, ps_out, bsp, err);
    };
  });

  // segment
  std::string seg_bsp, seg_out, seg_variance = to_string(defaults.pipeline.variance);
  double seg_k = defaults.peak_k;
  auto* segment = app.add_subcommand("segment", "pick boundaries from a profile CSV");
  segment->add_option("--bsp", seg_bsp, "profile CSV")->required()->check(CLI::ExistingFile);
  segment->add_option("--k", seg_k, "threshold multiplier")->check(CLI::NonNegativeNumber);
  segment->add_option("--variance", seg_variance, "as_printed or standard_weighted")
      ->check(CLI::IsMember({"as_printed", "standard_weighted"}));
  segment->add_option("--out", seg_out, "segmentation CSV to write")->required();
  segment->callback([&] {
    action = [&] { cmd_segment(seg_bsp, seg_k, variance_from_string(seg_variance), seg_out); };
  });

  // baseline
  Common bl_c;
  std::string bl_method, bl_corpus, bl_train, bl_out;
  auto* baseline = app.add_subcommand("baseline", "run a reference segmenter");
  baseline->add_option("--method", bl_method, "always, never, gpr2a, tp or pmi")
      ->required()
      ->check(CLI::IsMember({"always", "never", "gpr2a", "tp", "pmi"}));
  baseline->add_option("--corpus", bl_corpus, "corpus to segment")
      ->required()
      ->check(CLI::ExistingPath);
  baseline->add_option("--train", bl_train, "corpus for tp/pmi statistics")
      ->check(CLI::ExistingPath)
      ->default_str("--corpus");
  baseline->add_option("--out", bl_out, "segmentation CSV (always/never/gpr2a) or profile CSV")
      ->required();
  add_common(baseline, bl_c);
  baseline->callback([&] {
    action = [&] { cmd_baseline(resolve(bl_c), bl_method, bl_corpus, bl_train, bl_out); };
  });

  // cv
  Common cv_c;
  std::string cv_corpus, cv_pipeline = "rbm", cv_range, cv_out;
  std::optional<int> cv_folds;
  auto* cv = app.add_subcommand("cv", "cross-validate a pipeline and write report files");
  cv->add_option("--corpus", cv_corpus, "corpus (defaults to the config 'corpus' key)")
      ->check(CLI::ExistingPath);
  cv->add_option("--pipeline", cv_pipeline, "rbm, rbm+ps or baseline:<always|never|gpr2a|tp|pmi>");
  cv->add_option("--ngram-range", cv_range, "n-gram lengths a..b")
      ->default_str(std::to_string(defaults.pipeline.n) + ".." + std::to_string(defaults.pipeline.n));
  cv->add_option("--folds", cv_folds, "number of folds")->default_str(std::to_string(defaults.folds));
  cv->add_option("--out-dir", cv_out, "report directory (defaults to the config 'out_dir' key)");
  add_common(cv, cv_c);
  cv->callback([&] {
    action = [&] {
      auto cfg = resolve(cv_c);
      if (cv_folds) cfg.folds = *cv_folds;
      validate_run_config(cfg);
      const std::string corpus = cv_corpus.empty() ? cfg.corpus.string() : cv_corpus;
      const std::string dir = cv_out.empty() ? cfg.out_dir.string() : cv_out;
      if (corpus.empty()) throw ValidationError("cv needs --corpus or a 'corpus' config key");
      if (dir.empty()) throw ValidationError("cv needs --out-dir or an 'out_dir' config key");
      const auto range = cv_range.empty() ? NgramRange{cfg.pipeline.n, cfg.pipeline.n}
                                          : parse_ngram_range(cv_range);
      cmd_cv(cfg, corpus, cv_pipeline, range, dir, err);
    };
  });

  // synth
  std::string sy_spec, sy_out;
  std::optional<std::uint64_t> sy_seed;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted phrases");
  synth->add_option("--spec", sy_spec, "JSON overrides for the generator")
      ->check(CLI::ExistingFile)
      ->default_str("built-in");
  synth->add_option("--seed", sy_seed, "generator seed; overrides MELSEG_SEED")->default_str("1");
  synth->add_option("--out-dir", sy_out, "directory for melody CSVs and manifest.txt")->required();
  synth->callback([&] {
    action = [&] {
      const auto seed = resolve_seed(default_run_config(), sy_seed ? &*sy_seed : nullptr);
      cmd_synth(sy_spec, seed, sy_out);
    };
  });

  // plot
  std::string pl_bsp, pl_melody, pl_truth, pl_pred, pl_out;
  auto* plot = app.add_subcommand("plot", "draw one melody's profile, truth and predictions as SVG");
  plot->add_option("--bsp", pl_bsp, "profile CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--melody", pl_melody, "melody id")->default_str("stem of --truth");
  plot->add_option("--truth", pl_truth, "melody CSV with phrase-start flags")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--pred", pl_pred, "segmentation CSV")->check(CLI::ExistingFile)->default_str("none");
  plot->add_option("--out", pl_out, "SVG to write; a .csv with the data goes beside it")->required();
  plot->callback([&] { action = [&] { cmd_plot(pl_bsp, pl_melody, pl_truth, pl_pred, pl_out); }; });

  // config
  auto* config = app.add_subcommand("config", "print the default run config as JSON");
  config->callback([&] { action = [&] { out << run_config_to_json(default_run_config()); }; });

  std::vector<std::string> argv(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help arrives here too when requested as `melseg cv --help`.
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << e.what();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    action();
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace melseg::cli
