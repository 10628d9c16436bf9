#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "melseg/corpus.hpp"

namespace melseg {

// Sizes of the four one-hot viewpoint blocks making up one note column:
// |interval| (semitones), contour, inter-onset interval (semiquavers) and
// offset-to-onset interval (quavers). Out-of-range values are clamped.
struct ViewpointConfig {
  int abs_interval_bins = 13;
  int contour_bins = 3;
  int ioi_bins = 16;
  int ooi_bins = 9;

  int note_width() const noexcept {
    return abs_interval_bins + contour_bins + ioi_bins + ooi_bins;
  }
  void validate() const;

  friend bool operator==(const ViewpointConfig&, const ViewpointConfig&) = default;
};

enum class Contour : std::uint8_t { Down = 0, Equal = 1, Up = 2 };

// Bin indices of one note. Also serves as the digram symbol for the
// statistical baselines, so every model sees the same quantization.
struct NoteSymbol {
  int abs_interval = 0;  // 0..abs_interval_bins-1 semitones
  Contour contour = Contour::Equal;
  int ioi = 1;           // 1..ioi_bins semiquavers
  int ooi = 0;           // 0..ooi_bins-1 quavers

  // Dense index in [0, abs_interval_bins * 3 * ioi_bins * ooi_bins).
  int index(const ViewpointConfig& cfg) const noexcept;

  friend bool operator==(const NoteSymbol&, const NoteSymbol&) = default;
};

NoteSymbol note_symbol(const NoteEvent* prev, const NoteEvent& cur, const ViewpointConfig& cfg);

// One 0/1 entry per bit; size cfg.note_width().
std::vector<std::uint8_t> encode_note(const NoteEvent* prev, const NoteEvent& cur,
                                      const ViewpointConfig& cfg);

// Writes the one-hot column for `sym` into `out` (size note_width, zeroed here).
void write_note_column(const NoteSymbol& sym, const ViewpointConfig& cfg,
                       std::span<std::uint8_t> out);

using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RowMeta {
  std::uint32_t melody = 0;  // index into NGramBatch::melody_ids
  std::uint32_t note = 0;
};

// Sliding-window n-gram instances, one row per target note. Row t holds the
// columns of notes t-n+1..t; positions before the melody start are noise.
struct NGramBatch {
  int n = 1;
  ViewpointConfig viewpoints;
  BitMatrix rows;
  std::vector<RowMeta> row_meta;
  std::vector<bool> padded;
  std::vector<std::string> melody_ids;

  int row_width() const noexcept { return n * viewpoints.note_width(); }
  std::size_t size() const noexcept { return row_meta.size(); }
};

// Noise bits for context position `position` of target note `t` come from a
// stream keyed by (seed, melody id, t, position), so the result does not
// depend on encoding order.
NGramBatch encode_melody(const Melody& m, int n, const ViewpointConfig& cfg, std::uint64_t seed);

// Encodes every melody (optionally in parallel) and concatenates them in
// corpus order.
NGramBatch encode_corpus(const Corpus& corpus, int n, const ViewpointConfig& cfg,
                         std::uint64_t seed, unsigned threads = 1);

// Plain PBM (P1) image of the batch, one instance per image row.
std::string to_pbm(const NGramBatch& batch);

}  // namespace melseg
