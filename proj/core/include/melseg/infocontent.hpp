#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "melseg/corpus.hpp"
#include "melseg/rbm.hpp"
#include "melseg/sampler.hpp"

namespace melseg {

// Boundary-strength profile: one information-content value (bits) per note.
struct Bsp {
  std::string melody_id;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

// log2(1/p) for p in (0, 1].
double information_content(double p);

// Sampler stream used for note `note_index` of melody `melody_id`. Keying by
// note identity makes estimates independent of evaluation order.
std::uint64_t note_stream(std::string_view melody_id, std::size_t note_index);

// Encodes the melody with the model's viewpoints (noise seed = cfg.seed) and
// turns each note's conditional probability into IC.
Bsp bsp_for_melody(const RbmModel& model, const Melody& melody, int n, const SamplerConfig& cfg);

// Same as bsp_for_melody over a whole corpus; notes are spread over
// `threads` workers and the output does not depend on the thread count.
std::vector<Bsp> bsp_for_corpus(const RbmModel& model, const Corpus& corpus, int n,
                                const SamplerConfig& cfg, unsigned threads = 1);

inline constexpr std::string_view kBspCsvHeader = "melody_id,note_index,ic";

std::string bsp_to_csv(const std::vector<Bsp>& profiles);
std::vector<Bsp> bsp_from_csv(std::string_view text);

}  // namespace melseg
