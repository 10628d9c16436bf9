#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "melseg/infocontent.hpp"

namespace melseg {

enum class VarianceFormula {
  // sum_i (w_i S_i - m)^2 / sum_i w_i, weights inside the square.
  AsPrinted,
  // sum_i w_i (S_i - m)^2 / sum_i w_i, the usual weighted variance.
  StandardWeighted,
};

struct PeakPickConfig {
  double k = 1.0;
  VarianceFormula variance = VarianceFormula::AsPrinted;
};

// A note n (0-based here, n >= 1) is a boundary iff it is a local peak
// (S_n > S_{n-1} and S_n >= S_{n+1}, right side vacuous at the end) and
// exceeds k times the weighted deviation above the weighted mean of all
// preceding values, with triangular weights w_i = i + 1. Note 0 is never a
// boundary; the last note is always a boundary.
std::vector<std::uint8_t> pick_boundaries(const Bsp& bsp, const PeakPickConfig& cfg);

// Threshold the value at index n must exceed (0-based, n >= 1).
double peak_threshold(const std::vector<double>& values, std::size_t n, const PeakPickConfig& cfg);

inline const std::vector<double> kRawIcKSet{0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.00};
inline const std::vector<double> kSmoothedKSet{0.24, 0.26, 0.28, 0.30, 0.32, 0.34, 0.36};

struct KSweepEntry {
  double k = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct KSweepResult {
  double best_k = 0.0;
  double best_f1 = 0.0;
  std::vector<KSweepEntry> table;  // in k_values order
};

// F1 of the picked boundaries against `truth` for every k; the best k is the
// arg-max with ties going to the smaller k.
KSweepResult sweep_k(const std::vector<Bsp>& profiles,
                     const std::vector<std::vector<std::uint8_t>>& truth,
                     const std::vector<double>& k_values,
                     VarianceFormula variance = VarianceFormula::AsPrinted);

struct Segmentation {
  std::string melody_id;
  std::vector<std::uint8_t> boundaries;
};

inline constexpr std::string_view kSegmentationCsvHeader = "melody_id,note_index,boundary";

std::string segmentation_to_csv(const std::vector<Segmentation>& segs);
std::vector<Segmentation> segmentation_from_csv(std::string_view text);

}  // namespace melseg
