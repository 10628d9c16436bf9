#include "melseg/encoding.hpp"

#include <algorithm>
#include <cstdlib>

#include "melseg/error.hpp"
#include "melseg/parallel.hpp"
#include "melseg/random.hpp"

namespace melseg {

void ViewpointConfig::validate() const {
  if (abs_interval_bins < 1 || contour_bins != 3 || ioi_bins < 1 || ooi_bins < 1) {
    throw Error(ErrorCode::InvalidConfig,
                "viewpoint bins must be >= 1 and contour must have exactly 3 bins");
  }
}

int NoteSymbol::index(const ViewpointConfig& cfg) const noexcept {
  int idx = abs_interval;
  idx = idx * cfg.contour_bins + static_cast<int>(contour);
  idx = idx * cfg.ioi_bins + (ioi - 1);
  idx = idx * cfg.ooi_bins + ooi;
  return idx;
}

NoteSymbol note_symbol(const NoteEvent* prev, const NoteEvent& cur, const ViewpointConfig& cfg) {
  NoteSymbol s;
  if (prev == nullptr) return s;
  const int interval = cur.pitch - prev->pitch;
  s.abs_interval = std::clamp(std::abs(interval), 0, cfg.abs_interval_bins - 1);
  s.contour = interval < 0 ? Contour::Down : (interval > 0 ? Contour::Up : Contour::Equal);
  const auto ioi = cur.onset - prev->onset;
  s.ioi = static_cast<int>(std::clamp<std::int64_t>(ioi, 1, cfg.ioi_bins));
  // Rest in ticks, clamped to 16 ticks before truncating to quavers.
  const auto rest = std::clamp<std::int64_t>(cur.gap_after(*prev), 0, 16);
  s.ooi = static_cast<int>(std::clamp<std::int64_t>(rest / 2, 0, cfg.ooi_bins - 1));
  return s;
}

void write_note_column(const NoteSymbol& sym, const ViewpointConfig& cfg,
                       std::span<std::uint8_t> out) {
  std::fill(out.begin(), out.end(), std::uint8_t{0});
  int offset = 0;
  out[offset + sym.abs_interval] = 1;
  offset += cfg.abs_interval_bins;
  out[offset + static_cast<int>(sym.contour)] = 1;
  offset += cfg.contour_bins;
  out[offset + sym.ioi - 1] = 1;
  offset += cfg.ioi_bins;
  out[offset + sym.ooi] = 1;
}

std::vector<std::uint8_t> encode_note(const NoteEvent* prev, const NoteEvent& cur,
                                      const ViewpointConfig& cfg) {
  std::vector<std::uint8_t> col(cfg.note_width());
  write_note_column(note_symbol(prev, cur, cfg), cfg, col);
  return col;
}

NGramBatch encode_melody(const Melody& m, int n, const ViewpointConfig& cfg, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "n-gram length must be >= 1");
  cfg.validate();
  const int width = cfg.note_width();
  const auto count = static_cast<Eigen::Index>(m.size());

  // Columns of every real note, computed once.
  std::vector<std::uint8_t> columns(static_cast<std::size_t>(count) * width);
  for (Eigen::Index t = 0; t < count; ++t) {
    const NoteEvent* prev = t > 0 ? &m.notes[t - 1] : nullptr;
    write_note_column(note_symbol(prev, m.notes[t], cfg), cfg,
                      std::span(columns.data() + t * width, width));
  }

  NGramBatch batch;
  batch.n = n;
  batch.viewpoints = cfg;
  batch.melody_ids = {m.id};
  batch.rows.setZero(count, static_cast<Eigen::Index>(n) * width);
  batch.row_meta.resize(count);
  batch.padded.resize(count);
  const auto melody_key = hash_string(m.id);

  for (Eigen::Index t = 0; t < count; ++t) {
    batch.row_meta[t] = {0, static_cast<std::uint32_t>(t)};
    batch.padded[t] = t < n - 1;
    for (int pos = 0; pos < n; ++pos) {
      const Eigen::Index note = t - (n - 1) + pos;
      std::uint8_t* dst = batch.rows.row(t).data() + pos * width;
      if (note >= 0) {
        std::copy_n(columns.data() + note * width, width, dst);
      } else {
        SplitMix64Engine rng(derive_key({seed, melody_key, static_cast<std::uint64_t>(t),
                                         static_cast<std::uint64_t>(pos)}));
        for (int b = 0; b < width; ++b) dst[b] = rng.bernoulli(0.5) ? 1 : 0;
      }
    }
  }
  return batch;
}

NGramBatch encode_corpus(const Corpus& corpus, int n, const ViewpointConfig& cfg,
                         std::uint64_t seed, unsigned threads) {
  std::vector<NGramBatch> parts(corpus.melodies.size());
  parallel_for(parts.size(), threads,
               [&](std::size_t i) { parts[i] = encode_melody(corpus.melodies[i], n, cfg, seed); });

  NGramBatch out;
  out.n = n;
  out.viewpoints = cfg;
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.rows.rows();
  out.rows.resize(total, static_cast<Eigen::Index>(n) * cfg.note_width());
  out.row_meta.reserve(total);
  out.padded.reserve(total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto& p = parts[i];
    out.rows.middleRows(at, p.rows.rows()) = p.rows;
    at += p.rows.rows();
    for (auto meta : p.row_meta) out.row_meta.push_back({static_cast<std::uint32_t>(i), meta.note});
    out.padded.insert(out.padded.end(), p.padded.begin(), p.padded.end());
    out.melody_ids.push_back(std::move(p.melody_ids.front()));
  }
  return out;
}

std::string to_pbm(const NGramBatch& batch) {
  std::string out = "P1\n" + std::to_string(batch.rows.cols()) + " " +
                    std::to_string(batch.rows.rows()) + "\n";
  for (Eigen::Index r = 0; r < batch.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < batch.rows.cols(); ++c) {
      if (c > 0) out += ' ';
      out += batch.rows(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

}  // namespace melseg
