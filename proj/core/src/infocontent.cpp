#include "melseg/infocontent.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "melseg/encoding.hpp"
#include "melseg/error.hpp"
#include "melseg/io.hpp"
#include "melseg/parallel.hpp"
#include "melseg/random.hpp"

namespace melseg {

namespace {

void require_matching(const RbmModel& model, int n) {
  if (model.n != n) {
    throw Error(ErrorCode::ConfigMismatch, "model was trained on " + std::to_string(model.n) +
                                               "-grams, requested n = " + std::to_string(n));
  }
}

}  // namespace

double information_content(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw Error(ErrorCode::NonPositiveProbability,
                "information content needs p in (0, 1], got " + format_double(p));
  }
  return -std::log2(p);
}

std::uint64_t note_stream(std::string_view melody_id, std::size_t note_index) {
  return derive_key({hash_string(melody_id), static_cast<std::uint64_t>(note_index)});
}

Bsp bsp_for_melody(const RbmModel& model, const Melody& melody, int n, const SamplerConfig& cfg) {
  Corpus single;
  single.melodies.push_back(melody);
  return bsp_for_corpus(model, single, n, cfg, 1).front();
}

std::vector<Bsp> bsp_for_corpus(const RbmModel& model, const Corpus& corpus, int n,
                                const SamplerConfig& cfg, unsigned threads) {
  require_matching(model, n);
  cfg.validate();
  const auto batch = encode_corpus(corpus, n, model.viewpoints, cfg.seed, threads);

  std::vector<double> ic(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t r) {
    const auto meta = batch.row_meta[r];
    const auto& id = batch.melody_ids[meta.melody];
    const auto row = batch.rows.row(static_cast<Eigen::Index>(r));
    const double p = conditional_note_prob(
        model, std::span<const std::uint8_t>(row.data(), static_cast<std::size_t>(row.size())), n,
        cfg, note_stream(id, meta.note));
    ic[r] = information_content(p);
  });

  std::vector<Bsp> out(corpus.melodies.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].melody_id = corpus.melodies[i].id;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    out[batch.row_meta[r].melody].values.push_back(ic[r]);
  }
  return out;
}

std::string bsp_to_csv(const std::vector<Bsp>& profiles) {
  std::string out(kBspCsvHeader);
  out += '\n';
  for (const auto& bsp : profiles) {
    for (std::size_t i = 0; i < bsp.values.size(); ++i) {
      out += bsp.melody_id;
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += format_significant(bsp.values[i], 9);
      out += '\n';
    }
  }
  return out;
}

std::vector<Bsp> bsp_from_csv(std::string_view text) {
  std::vector<Bsp> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (header) {
      if (line != kBspCsvHeader) {
        throw Error(ErrorCode::MalformedHeader,
                    "BSP CSV: expected header '" + std::string(kBspCsvHeader) + "'");
      }
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "BSP CSV line " + std::to_string(line_no) +
                                             ": expected 3 fields");
    }
    const std::string id(line.substr(0, c1));
    const auto idx_text = line.substr(c1 + 1, c2 - c1 - 1);
    std::size_t index = 0;
    auto [iptr, iec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
    const std::string value_text(line.substr(c2 + 1));
    char* vend = nullptr;
    const double value = std::strtod(value_text.c_str(), &vend);
    if (iec != std::errc() || iptr != idx_text.data() + idx_text.size() || value_text.empty() ||
        *vend != '\0' || !std::isfinite(value)) {
      throw Error(ErrorCode::ParseError,
                  "BSP CSV line " + std::to_string(line_no) + ": bad index or IC value");
    }
    if (out.empty() || out.back().melody_id != id) out.push_back(Bsp{id, {}});
    if (index != out.back().values.size()) {
      throw Error(ErrorCode::ParseError, "BSP CSV line " + std::to_string(line_no) +
                                             ": note indices must run 0,1,2,... per melody");
    }
    out.back().values.push_back(value);
  }
  if (header) throw Error(ErrorCode::MalformedHeader, "BSP CSV: empty document");
  return out;
}

}  // namespace melseg
