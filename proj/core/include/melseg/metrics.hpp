#pragma once

#include <cstdint>
#include <vector>

namespace melseg {

struct Counts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  Counts& operator+=(const Counts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// P = 0 without predictions, R = 0 without truth, F1 = 0 when P + R = 0.
Prf prf_from_counts(const Counts& c) noexcept;

// Pooled (micro-averaged) counts over every note of every melody. Throws
// LengthMismatch when the melody count or any melody length differs.
Counts count_matches(const std::vector<std::vector<std::uint8_t>>& pred,
                     const std::vector<std::vector<std::uint8_t>>& truth);

Prf prf1(const std::vector<std::vector<std::uint8_t>>& pred,
         const std::vector<std::vector<std::uint8_t>>& truth);

}  // namespace melseg
