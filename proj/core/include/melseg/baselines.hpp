#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "melseg/corpus.hpp"
#include "melseg/encoding.hpp"
#include "melseg/infocontent.hpp"

namespace melseg {

// Boundary at every note except the first (final forced).
std::vector<std::uint8_t> baseline_always(const Melody& m);
// Only the forced final boundary.
std::vector<std::uint8_t> baseline_never(const Melody& m);
// Boundary wherever a rest precedes the note, plus the final note.
std::vector<std::uint8_t> baseline_gpr2a(const Melody& m);

enum class DigramMethod { TransitionProbability, PointwiseMutualInformation };

std::string_view to_string(DigramMethod method);

// Unigram and digram counts over note symbols (the encoder's quantization).
struct DigramStats {
  ViewpointConfig viewpoints;
  std::map<int, std::uint64_t> unigram;  // every note
  std::map<int, std::uint64_t> left;     // notes that have a successor
  std::map<std::pair<int, int>, std::uint64_t> digram;
  std::uint64_t unigram_total = 0;
  std::uint64_t digram_total = 0;

  // Distinct symbols seen in training plus one slot for unseen symbols.
  std::uint64_t alphabet_size() const noexcept { return unigram.size() + 1; }

  std::uint64_t count(int a) const;
  std::uint64_t count(int a, int b) const;
};

// Throws EmptyTrainingSet if the corpus has no digrams.
DigramStats build_digram_stats(const Corpus& training, const ViewpointConfig& cfg = {});

// -log2 P(b | a) with add-one smoothing.
double transition_strength(const DigramStats& stats, int a, int b);
// -log2 [P(a, b) / (P(a) P(b))] with add-one smoothing. May be negative.
double pmi_strength(const DigramStats& stats, int a, int b);

// Strength profile per melody; note 0 gets 0.
Bsp digram_profile(const DigramStats& stats, const Melody& m, DigramMethod method);
std::vector<Bsp> baseline_digram(const DigramStats& stats, const Corpus& corpus,
                                 DigramMethod method);

}  // namespace melseg
