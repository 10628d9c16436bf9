#include <json.hpp>

#include "melseg/error.hpp"
#include "melseg/io.hpp"
#include "melseg/rbm.hpp"

namespace melseg {

using ojson = nlohmann::ordered_json;

namespace {

ojson viewpoints_to_json(const ViewpointConfig& cfg) {
  return ojson{{"abs_interval_bins", cfg.abs_interval_bins},
               {"contour_bins", cfg.contour_bins},
               {"ioi_bins", cfg.ioi_bins},
               {"ooi_bins", cfg.ooi_bins}};
}

ViewpointConfig viewpoints_from_json(const ojson& j) {
  ViewpointConfig cfg;
  cfg.abs_interval_bins = j.at("abs_interval_bins").get<int>();
  cfg.contour_bins = j.at("contour_bins").get<int>();
  cfg.ioi_bins = j.at("ioi_bins").get<int>();
  cfg.ooi_bins = j.at("ooi_bins").get<int>();
  cfg.validate();
  return cfg;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const ojson& j, Eigen::Index expected, const char* name) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has " +
                                                  std::to_string(values.size()) +
                                                  " entries, expected " + std::to_string(expected));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), expected);
}

}  // namespace

std::string rbm_to_json(const RbmModel& model) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(model.W.size()));
  for (Eigen::Index i = 0; i < model.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.W.cols(); ++j) w.push_back(model.W(i, j));
  }
  ojson doc;
  doc["format_version"] = 1;
  doc["kind"] = "rbm";
  doc["r"] = model.visible();
  doc["q"] = model.hidden();
  doc["W"] = w;
  doc["a"] = to_vector(model.a);
  doc["b"] = to_vector(model.b);
  doc["seed"] = model.seed;
  doc["epochs"] = model.epochs;
  doc["viewpoint_config"] = viewpoints_to_json(model.viewpoints);
  doc["n"] = model.n;
  return doc.dump() + "\n";
}

RbmModel rbm_from_json(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != 1 || doc.at("kind").get<std::string>() != "rbm") {
      throw Error(ErrorCode::ParseError, "not a format_version 1 rbm document");
    }
    const int r = doc.at("r").get<int>();
    const int q = doc.at("q").get<int>();
    if (r < 1 || q < 1) throw Error(ErrorCode::ParseError, "r and q must be >= 1");
    RbmModel m = RbmModel::zeros(r, q);
    const auto w = doc.at("W").get<std::vector<double>>();
    if (w.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(q)) {
      throw Error(ErrorCode::DimensionMismatch, "W has wrong number of entries");
    }
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < q; ++j) m.W(i, j) = w[static_cast<std::size_t>(i) * q + j];
    }
    m.a = vector_from_json(doc.at("a"), r, "a");
    m.b = vector_from_json(doc.at("b"), q, "b");
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.epochs = doc.at("epochs").get<int>();
    m.viewpoints = viewpoints_from_json(doc.at("viewpoint_config"));
    m.n = doc.at("n").get<int>();
    if (!m.finite()) throw Error(ErrorCode::ParseError, "non-finite parameters");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  }
}

void save_rbm(const RbmModel& model, const std::filesystem::path& path) {
  write_text_file_atomic(path, rbm_to_json(model));
}

RbmModel load_rbm(const std::filesystem::path& path) { return rbm_from_json(read_text_file(path)); }

}  // namespace melseg
