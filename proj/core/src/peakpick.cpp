#include "melseg/peakpick.hpp"

#include <charconv>
#include <cmath>

#include "melseg/error.hpp"
#include "melseg/metrics.hpp"

namespace melseg {

double peak_threshold(const std::vector<double>& values, std::size_t n, const PeakPickConfig& cfg) {
  double sum_w = 0.0;
  double sum_ws = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(i + 1);
    sum_w += w;
    sum_ws += w * values[i];
  }
  const double mean = sum_ws / sum_w;
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(i + 1);
    if (cfg.variance == VarianceFormula::AsPrinted) {
      const double d = w * values[i] - mean;
      dev += d * d;
    } else {
      const double d = values[i] - mean;
      dev += w * d * d;
    }
  }
  return cfg.k * std::sqrt(dev / sum_w) + mean;
}

std::vector<std::uint8_t> pick_boundaries(const Bsp& bsp, const PeakPickConfig& cfg) {
  const auto& s = bsp.values;
  if (s.empty()) throw Error(ErrorCode::EmptyBsp, "empty profile for '" + bsp.melody_id + "'");
  if (!(cfg.k > 0.0)) throw Error(ErrorCode::InvalidConfig, "peak-picking k must be > 0");
  std::vector<std::uint8_t> out(s.size(), 0);
  for (std::size_t n = 1; n < s.size(); ++n) {
    const bool left = s[n] > s[n - 1];
    const bool right = n + 1 == s.size() || s[n] >= s[n + 1];
    if (left && right && s[n] > peak_threshold(s, n, cfg)) out[n] = 1;
  }
  out.back() = 1;
  return out;
}

KSweepResult sweep_k(const std::vector<Bsp>& profiles,
                     const std::vector<std::vector<std::uint8_t>>& truth,
                     const std::vector<double>& k_values, VarianceFormula variance) {
  if (k_values.empty()) throw Error(ErrorCode::EmptyKSet, "no k values to sweep");
  KSweepResult result;
  bool first = true;
  for (double k : k_values) {
    std::vector<std::vector<std::uint8_t>> pred;
    pred.reserve(profiles.size());
    for (const auto& p : profiles) pred.push_back(pick_boundaries(p, {k, variance}));
    const auto m = prf1(pred, truth);
    result.table.push_back({k, m.precision, m.recall, m.f1});
    if (first || m.f1 > result.best_f1 || (m.f1 == result.best_f1 && k < result.best_k)) {
      result.best_k = k;
      result.best_f1 = m.f1;
      first = false;
    }
  }
  return result;
}

std::string segmentation_to_csv(const std::vector<Segmentation>& segs) {
  std::string out(kSegmentationCsvHeader);
  out += '\n';
  for (const auto& s : segs) {
    for (std::size_t i = 0; i < s.boundaries.size(); ++i) {
      out += s.melody_id;
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += s.boundaries[i] ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

std::vector<Segmentation> segmentation_from_csv(std::string_view text) {
  std::vector<Segmentation> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (header) {
      if (line != kSegmentationCsvHeader) {
        throw Error(ErrorCode::MalformedHeader, "segmentation CSV: expected header '" +
                                                    std::string(kSegmentationCsvHeader) + "'");
      }
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.size() != c2 + 2 ||
        (line.back() != '0' && line.back() != '1')) {
      throw Error(ErrorCode::ParseError,
                  "segmentation CSV line " + std::to_string(line_no) + ": malformed row");
    }
    const std::string id(line.substr(0, c1));
    const auto idx_text = line.substr(c1 + 1, c2 - c1 - 1);
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
      throw Error(ErrorCode::ParseError,
                  "segmentation CSV line " + std::to_string(line_no) + ": bad note index");
    }
    if (out.empty() || out.back().melody_id != id) out.push_back({id, {}});
    if (index != out.back().boundaries.size()) {
      throw Error(ErrorCode::ParseError, "segmentation CSV line " + std::to_string(line_no) +
                                             ": note indices must run 0,1,2,... per melody");
    }
    out.back().boundaries.push_back(line.back() == '1' ? 1 : 0);
  }
  if (header) throw Error(ErrorCode::MalformedHeader, "segmentation CSV: empty document");
  return out;
}

}  // namespace melseg
