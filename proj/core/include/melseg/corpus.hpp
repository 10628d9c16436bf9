#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace melseg {

// One note on a sixteenth-note grid (1 tick = one semiquaver).
struct NoteEvent {
  std::int64_t onset = 0;
  std::int64_t duration = 1;
  int pitch = 60;  // MIDI note number
  bool phrase_start = false;

  // Rest between the previous note's offset and this onset, in ticks.
  std::int64_t gap_after(const NoteEvent& prev) const noexcept {
    return onset - (prev.onset + prev.duration);
  }

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct Melody {
  std::string id;
  std::vector<NoteEvent> notes;

  std::size_t size() const noexcept { return notes.size(); }
};

struct Corpus {
  std::vector<Melody> melodies;
  std::filesystem::path source;

  std::size_t note_count() const noexcept;
};

inline constexpr std::string_view kMelodyCsvHeader =
    "onset_16th,duration_16th,midi_pitch,phrase_start";

// Throws Error on any invariant violation: non-empty, strictly increasing and
// non-overlapping notes, first note starts a phrase.
void validate_melody(const Melody& m);

Melody parse_melody(std::string_view text, std::string id);
std::string serialize_melody(const Melody& m);

Melody load_melody(const std::filesystem::path& csv);

// `manifest` is either a directory (all *.csv, sorted by filename) or a text
// file with one relative path per line; blank lines and `#` comments are
// skipped. Melody ids are file stems and must be unique.
Corpus load_corpus(const std::filesystem::path& manifest);

// Writes one CSV per melody plus a `manifest.txt` listing them.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

// Ground-truth boundaries: 1 where a note starts a phrase, note 0 masked out,
// last note forced to 1.
std::vector<std::uint8_t> boundary_vector(const Melody& m);

// Fraction of all notes carrying a phrase-start flag (first notes included),
// i.e. the raw annotation density before any masking or final forcing.
double phrase_start_density(const Corpus& corpus);

// Fraction of 1s in boundary_vector over the evaluable positions (notes
// 1..L-1, or the single note of a one-note melody). This is the density b for
// which the Always baseline scores P = b, R = 1, F1 = 2b/(1+b).
double boundary_density(const Corpus& corpus);

}  // namespace melseg
