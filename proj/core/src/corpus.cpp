#include "melseg/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "melseg/error.hpp"
#include "melseg/io.hpp"

namespace melseg {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parse_int(std::string_view field, std::size_t line_no, const std::string& id) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::NonIntegerField, id + ":" + std::to_string(line_no) +
                                                ": field '" + std::string(field) +
                                                "' is not a decimal integer");
  }
  return value;
}

std::string where(const Melody& m, std::size_t index) {
  return m.id + ": note " + std::to_string(index);
}

}  // namespace

std::size_t Corpus::note_count() const noexcept {
  std::size_t n = 0;
  for (const auto& m : melodies) n += m.size();
  return n;
}

void validate_melody(const Melody& m) {
  if (m.notes.empty()) throw Error(ErrorCode::EmptyMelody, m.id + ": no notes");
  for (std::size_t i = 0; i < m.notes.size(); ++i) {
    const auto& n = m.notes[i];
    if (n.duration < 1 || n.onset < 0 || n.pitch < 0 || n.pitch > 127) {
      throw Error(ErrorCode::InvalidNote,
                  where(m, i) + ": requires onset >= 0, duration >= 1, pitch in [0,127]");
    }
    if (i == 0) continue;
    const auto& prev = m.notes[i - 1];
    if (n.onset <= prev.onset) {
      throw Error(ErrorCode::NonMonotoneOnset, where(m, i) + ": onset " +
                                                   std::to_string(n.onset) +
                                                   " does not follow " +
                                                   std::to_string(prev.onset));
    }
    if (n.gap_after(prev) < 0) {
      throw Error(ErrorCode::OverlappingNotes,
                  where(m, i) + ": starts before the previous note ends");
    }
  }
  if (!m.notes.front().phrase_start) {
    throw Error(ErrorCode::FirstNoteNotPhraseStart, m.id + ": first note must start a phrase");
  }
}

Melody parse_melody(std::string_view text, std::string id) {
  Melody m;
  m.id = std::move(id);
  auto lines = split(text, '\n');
  // A terminating LF leaves one empty trailing element.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kMelodyCsvHeader) {
    throw Error(ErrorCode::MalformedHeader,
                m.id + ": expected header '" + std::string(kMelodyCsvHeader) + "'");
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split(lines[li], ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::NonIntegerField,
                  m.id + ":" + std::to_string(li + 1) + ": expected 4 fields");
    }
    NoteEvent n;
    n.onset = parse_int(fields[0], li + 1, m.id);
    n.duration = parse_int(fields[1], li + 1, m.id);
    const auto pitch = parse_int(fields[2], li + 1, m.id);
    const auto flag = parse_int(fields[3], li + 1, m.id);
    if (flag != 0 && flag != 1) {
      throw Error(ErrorCode::NonIntegerField,
                  m.id + ":" + std::to_string(li + 1) + ": phrase_start must be 0 or 1");
    }
    if (pitch < 0 || pitch > 127) {
      throw Error(ErrorCode::InvalidNote,
                  m.id + ":" + std::to_string(li + 1) + ": pitch out of range");
    }
    n.pitch = static_cast<int>(pitch);
    n.phrase_start = flag == 1;
    m.notes.push_back(n);
  }
  validate_melody(m);
  return m;
}

std::string serialize_melody(const Melody& m) {
  std::string out(kMelodyCsvHeader);
  out += '\n';
  for (const auto& n : m.notes) {
    out += std::to_string(n.onset);
    out += ',';
    out += std::to_string(n.duration);
    out += ',';
    out += std::to_string(n.pitch);
    out += ',';
    out += n.phrase_start ? '1' : '0';
    out += '\n';
  }
  return out;
}

Melody load_melody(const std::filesystem::path& csv) {
  const auto text = read_text_file(csv);
  try {
    return parse_melody(text, csv.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), csv.string() + ": " + e.message());
  }
}

Corpus load_corpus(const std::filesystem::path& manifest) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(manifest)) {
    for (const auto& entry : fs::directory_iterator(manifest)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  } else {
    const auto text = read_text_file(manifest);
    const auto base = manifest.parent_path();
    for (auto line : split(text, '\n')) {
      if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
        line.remove_suffix(1);
      }
      while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
        line.remove_prefix(1);
      }
      if (line.empty()) continue;
      fs::path p{std::string(line)};
      files.push_back(p.is_absolute() ? p : base / p);
    }
  }
  if (files.empty()) {
    throw Error(ErrorCode::EmptyCorpus, manifest.string() + ": no melody files");
  }

  Corpus corpus;
  corpus.source = manifest;
  std::set<std::string> seen;
  for (const auto& f : files) {
    auto m = load_melody(f);
    if (!seen.insert(m.id).second) {
      throw Error(ErrorCode::DuplicateId, f.string() + ": duplicate melody id '" + m.id + "'");
    }
    corpus.melodies.push_back(std::move(m));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::string manifest;
  for (const auto& m : corpus.melodies) {
    write_text_file_atomic(dir / (m.id + ".csv"), serialize_melody(m));
    manifest += m.id + ".csv\n";
  }
  write_text_file_atomic(dir / "manifest.txt", manifest);
}

std::vector<std::uint8_t> boundary_vector(const Melody& m) {
  std::vector<std::uint8_t> out(m.size(), 0);
  for (std::size_t i = 1; i < m.size(); ++i) out[i] = m.notes[i].phrase_start ? 1 : 0;
  if (!out.empty()) out.back() = 1;
  return out;
}

double phrase_start_density(const Corpus& corpus) {
  std::size_t flags = 0;
  std::size_t notes = 0;
  for (const auto& m : corpus.melodies) {
    for (const auto& n : m.notes) flags += n.phrase_start ? 1 : 0;
    notes += m.size();
  }
  return notes == 0 ? 0.0 : static_cast<double>(flags) / static_cast<double>(notes);
}

double boundary_density(const Corpus& corpus) {
  std::size_t ones = 0;
  std::size_t positions = 0;
  for (const auto& m : corpus.melodies) {
    const auto truth = boundary_vector(m);
    for (auto b : truth) ones += b;
    positions += m.size() > 1 ? m.size() - 1 : m.size();
  }
  return positions == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(positions);
}

}  // namespace melseg
