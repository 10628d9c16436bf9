#include <algorithm>
#include <array>
#include <cstdio>
#include <vector>

#include "melseg/error.hpp"
#include "melseg/evalharness.hpp"
#include "melseg/random.hpp"

namespace melseg {

namespace {

int uniform_int(SplitMix64Engine& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bool in_major_scale(int pitch, int tonic) {
  static constexpr std::array<bool, 12> kMajor{true,  false, true,  false, true,  true,
                                               false, true,  false, true,  false, true};
  return kMajor[static_cast<std::size_t>(((pitch - tonic) % 12 + 12) % 12)];
}

// Scale tones reachable from `pitch` within the walk range whose distance
// lies in [lo, hi] semitones.
std::vector<int> candidates(int pitch, int tonic, int lo, int hi, const SynthSpec& s) {
  std::vector<int> out;
  for (int d = -hi; d <= hi; ++d) {
    const int next = pitch + d;
    if (std::abs(d) < lo || next < s.pitch_min || next > s.pitch_max) continue;
    if (in_major_scale(next, tonic)) out.push_back(next);
  }
  return out;
}

int pick(SplitMix64Engine& rng, const std::vector<int>& options) {
  return options[rng() % options.size()];
}

}  // namespace

void SynthSpec::validate() const {
  const bool ok = melodies >= 1 && phrases_min >= 1 && phrases_max >= phrases_min &&
                  phrase_len_min >= 1 && phrase_len_max >= phrase_len_min && max_step >= 1 &&
                  rest_cue_share >= 0.0 && rest_cue_share <= 1.0 && rest_min >= 1 &&
                  rest_max >= rest_min && leap_min >= 1 && leap_min <= 12 &&
                  pitch_min >= 0 && pitch_max <= 127 && pitch_max - pitch_min >= 2 * leap_min;
  if (!ok) throw Error(ErrorCode::InvalidSpec, "synthetic corpus ranges are empty or inconsistent");
}

Corpus generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Corpus corpus;
  corpus.source = "synthetic";
  static constexpr std::array<int, 5> kDurations{2, 2, 2, 4, 4};

  for (int mi = 0; mi < spec.melodies; ++mi) {
    SplitMix64Engine rng(derive_key({seed, static_cast<std::uint64_t>(mi)}));
    char id[32];
    std::snprintf(id, sizeof id, "synth_%04d", mi);
    Melody m;
    m.id = id;

    const int tonic = 60 + uniform_int(rng, 0, 11);
    int pitch = pick(rng, candidates((spec.pitch_min + spec.pitch_max) / 2, tonic, 0, 2, spec));
    std::int64_t onset = 0;
    const int phrases = uniform_int(rng, spec.phrases_min, spec.phrases_max);

    for (int ph = 0; ph < phrases; ++ph) {
      const int length = uniform_int(rng, spec.phrase_len_min, spec.phrase_len_max);
      for (int i = 0; i < length; ++i) {
        NoteEvent note;
        if (m.notes.empty()) {
          note.onset = 0;
        } else {
          const auto& prev = m.notes.back();
          onset = prev.onset + prev.duration;
          if (i == 0 && rng.uniform() < spec.rest_cue_share) {
            onset += uniform_int(rng, spec.rest_min, spec.rest_max);
            pitch = pick(rng, candidates(pitch, tonic, 0, spec.max_step, spec));
          } else if (i == 0) {
            pitch = pick(rng, candidates(pitch, tonic, spec.leap_min, 12, spec));
          } else {
            pitch = pick(rng, candidates(pitch, tonic, 0, spec.max_step, spec));
          }
          note.onset = onset;
        }
        note.pitch = pitch;
        note.duration = kDurations[rng() % kDurations.size()];
        note.phrase_start = i == 0;
        m.notes.push_back(note);
      }
    }
    validate_melody(m);
    corpus.melodies.push_back(std::move(m));
  }
  return corpus;
}

}  // namespace melseg
