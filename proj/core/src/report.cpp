#include <algorithm>
#include <cstdio>
#include <map>

#include "melseg/evalharness.hpp"
#include "melseg/io.hpp"

namespace melseg {

namespace {

std::string k_text(const std::optional<double>& k) { return k ? format_double(*k) : ""; }

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string report_rows_csv(const EvalReport& report) {
  std::string out = "model,ngram,k,fold,precision,recall,f1\n";
  for (const auto& r : report.rows) {
    out += r.model + "," + std::to_string(r.ngram) + "," + k_text(r.k) + "," +
           std::to_string(r.fold) + "," + format_double(r.prf.precision) + "," +
           format_double(r.prf.recall) + "," + format_double(r.prf.f1) + "\n";
  }
  return out;
}

std::string report_aggregate_csv(const EvalReport& report) {
  std::string out =
      "model,ngram,k,precision,recall,f1,tp,fp,fn,recall_rest,recall_no_rest,selected\n";
  for (const auto& a : report.aggregates) {
    out += a.model + "," + std::to_string(a.ngram) + "," + k_text(a.k) + "," +
           format_double(a.prf.precision) + "," + format_double(a.prf.recall) + "," +
           format_double(a.prf.f1) + "," + std::to_string(a.counts.tp) + "," +
           std::to_string(a.counts.fp) + "," + std::to_string(a.counts.fn) + "," +
           format_double(a.recall_rest) + "," + format_double(a.recall_no_rest) + "," +
           (a.selected ? "1" : "0") + "\n";
  }
  return out;
}

std::string report_f_scores_csv(const EvalReport& report) {
  // Sorted by (ngram, method) for a stable layout.
  std::map<std::pair<int, std::string>, double> best;
  for (const auto& a : report.aggregates) {
    if (a.selected) best[{a.ngram, a.model}] = a.prf.f1;
  }
  std::string out = "ngram,method,f1\n";
  for (const auto& [key, f1] : best) {
    out += std::to_string(key.first) + "," + key.second + "," + format_double(f1) + "\n";
  }
  return out;
}

std::string report_text_table(const EvalReport& report) {
  struct Line {
    std::string model;
    double p, r, f1;
    std::string k, tp, fp, fn, source;
  };
  std::vector<Line> lines;
  for (const auto& a : report.aggregates) {
    if (!a.selected) continue;
    lines.push_back({a.model, a.prf.precision, a.prf.recall, a.prf.f1, k_text(a.k),
                     std::to_string(a.counts.tp), std::to_string(a.counts.fp),
                     std::to_string(a.counts.fn), "computed"});
  }
  for (const auto& ref : reference_rows()) {
    lines.push_back({ref.model, ref.precision, ref.recall, ref.f1, "", "", "", "",
                     "reference (not computed)"});
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
    if (x.f1 != y.f1) return x.f1 > y.f1;
    if (x.model != y.model) return x.model < y.model;
    return x.source < y.source;
  });

  std::string out = pad("Model", 14) + pad_left("Precision", 10) + pad_left("Recall", 8) +
                    pad_left("F1", 7) + pad_left("k", 7) + pad_left("TP", 8) + pad_left("FP", 8) +
                    pad_left("FN", 8) + "  Source\n";
  for (const auto& l : lines) {
    out += pad(l.model, 14) + pad_left(fixed(l.p, 2 + (l.source == "computed")), 10) +
           pad_left(fixed(l.r, 2 + (l.source == "computed")), 8) +
           pad_left(fixed(l.f1, 2 + (l.source == "computed")), 7) + pad_left(l.k, 7) +
           pad_left(l.tp, 8) + pad_left(l.fp, 8) + pad_left(l.fn, 8) + "  " + l.source + "\n";
  }
  if (report.oracle_threshold) {
    out += "\nNote: k was chosen to maximize F1 on the evaluated folds (oracle threshold); "
           "scores are optimistic.\n";
  }
  return out;
}

std::string emit_report(const EvalReport& report, ReportFormat format) {
  return format == ReportFormat::Csv ? report_rows_csv(report) : report_text_table(report);
}

}  // namespace melseg
