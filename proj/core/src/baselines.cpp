#include "melseg/baselines.hpp"

#include <cmath>

#include "melseg/error.hpp"

namespace melseg {

std::vector<std::uint8_t> baseline_always(const Melody& m) {
  std::vector<std::uint8_t> out(m.size(), 1);
  if (m.size() > 1) out.front() = 0;
  return out;
}

std::vector<std::uint8_t> baseline_never(const Melody& m) {
  std::vector<std::uint8_t> out(m.size(), 0);
  if (!out.empty()) out.back() = 1;
  return out;
}

std::vector<std::uint8_t> baseline_gpr2a(const Melody& m) {
  std::vector<std::uint8_t> out(m.size(), 0);
  for (std::size_t t = 1; t < m.size(); ++t) {
    out[t] = m.notes[t].gap_after(m.notes[t - 1]) > 0 ? 1 : 0;
  }
  if (!out.empty()) out.back() = 1;
  return out;
}

std::string_view to_string(DigramMethod method) {
  return method == DigramMethod::TransitionProbability ? "TP" : "PMI";
}

std::uint64_t DigramStats::count(int a) const {
  const auto it = unigram.find(a);
  return it == unigram.end() ? 0 : it->second;
}

std::uint64_t DigramStats::count(int a, int b) const {
  const auto it = digram.find({a, b});
  return it == digram.end() ? 0 : it->second;
}

namespace {

std::vector<int> symbols(const Melody& m, const ViewpointConfig& cfg) {
  std::vector<int> out;
  out.reserve(m.size());
  for (std::size_t t = 0; t < m.size(); ++t) {
    const NoteEvent* prev = t > 0 ? &m.notes[t - 1] : nullptr;
    out.push_back(note_symbol(prev, m.notes[t], cfg).index(cfg));
  }
  return out;
}

}  // namespace

DigramStats build_digram_stats(const Corpus& training, const ViewpointConfig& cfg) {
  DigramStats s;
  s.viewpoints = cfg;
  for (const auto& m : training.melodies) {
    const auto sym = symbols(m, cfg);
    for (std::size_t t = 0; t < sym.size(); ++t) {
      ++s.unigram[sym[t]];
      ++s.unigram_total;
      if (t + 1 < sym.size()) {
        ++s.left[sym[t]];
        ++s.digram[{sym[t], sym[t + 1]}];
        ++s.digram_total;
      }
    }
  }
  if (s.digram_total == 0) {
    throw Error(ErrorCode::EmptyTrainingSet, "training melodies contain no note pairs");
  }
  return s;
}

double transition_strength(const DigramStats& stats, int a, int b) {
  const auto v = static_cast<double>(stats.alphabet_size());
  const auto it = stats.left.find(a);
  const double left = it == stats.left.end() ? 0.0 : static_cast<double>(it->second);
  const double p = (static_cast<double>(stats.count(a, b)) + 1.0) / (left + v);
  return -std::log2(p);
}

double pmi_strength(const DigramStats& stats, int a, int b) {
  const auto v = static_cast<double>(stats.alphabet_size());
  const double p_ab = (static_cast<double>(stats.count(a, b)) + 1.0) /
                      (static_cast<double>(stats.digram_total) + v * v);
  const double uni = static_cast<double>(stats.unigram_total) + v;
  const double p_a = (static_cast<double>(stats.count(a)) + 1.0) / uni;
  const double p_b = (static_cast<double>(stats.count(b)) + 1.0) / uni;
  return -std::log2(p_ab / (p_a * p_b));
}

Bsp digram_profile(const DigramStats& stats, const Melody& m, DigramMethod method) {
  const auto sym = symbols(m, stats.viewpoints);
  Bsp out{m.id, std::vector<double>(m.size(), 0.0)};
  for (std::size_t t = 1; t < sym.size(); ++t) {
    out.values[t] = method == DigramMethod::TransitionProbability
                        ? transition_strength(stats, sym[t - 1], sym[t])
                        : pmi_strength(stats, sym[t - 1], sym[t]);
  }
  return out;
}

std::vector<Bsp> baseline_digram(const DigramStats& stats, const Corpus& corpus,
                                 DigramMethod method) {
  std::vector<Bsp> out;
  out.reserve(corpus.melodies.size());
  for (const auto& m : corpus.melodies) out.push_back(digram_profile(stats, m, method));
  return out;
}

}  // namespace melseg
