#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "melseg_cli/run_config.hpp"

namespace melseg::cli {

namespace fs = std::filesystem;

// All commands take a RunConfig whose seed has already been resolved.

void cmd_train(const RunConfig& cfg, const fs::path& corpus, const fs::path& out, std::ostream& log);
void cmd_ic(const RunConfig& cfg, const fs::path& model, const fs::path& corpus, const fs::path& out);
// Writes the fine-tuned network to `out` and the smoothed profiles of the
// corpus to `bsp_out`.
void cmd_pseudo(const RunConfig& cfg, const fs::path& model, const fs::path& corpus,
                const fs::path& out, const fs::path& bsp_out, std::ostream& log);
void cmd_segment(const fs::path& bsp, double k, VarianceFormula variance, const fs::path& out);
// always/never/gpr2a write a segmentation CSV; tp/pmi write a profile CSV
// using digram statistics from `train_corpus` (or `corpus` when empty).
void cmd_baseline(const RunConfig& cfg, const std::string& method, const fs::path& corpus,
                  const fs::path& train_corpus, const fs::path& out);

struct NgramRange {
  int lo = 0;
  int hi = 0;
};
// "a..b" or a single "n".
NgramRange parse_ngram_range(const std::string& text);

void cmd_cv(const RunConfig& cfg, const fs::path& corpus, const std::string& pipeline,
            NgramRange range, const fs::path& out_dir, std::ostream& log);
// `spec` may be empty for the built-in defaults.
void cmd_synth(const fs::path& spec, std::uint64_t seed, const fs::path& out_dir);
// `truth` is a melody CSV; `pred` a segmentation CSV and may be empty. A data
// CSV with the plotted values is written next to the SVG.
void cmd_plot(const fs::path& bsp, const std::string& melody, const fs::path& truth,
              const fs::path& pred, const fs::path& out);

std::string render_plot_svg(const Melody& melody, const Bsp& bsp,
                            const std::vector<std::uint8_t>& truth,
                            const std::vector<std::uint8_t>* pred);

}  // namespace melseg::cli
