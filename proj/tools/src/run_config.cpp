#include "melseg_cli/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <functional>
#include <json.hpp>
#include <limits>

#include "melseg/io.hpp"

namespace melseg::cli {

namespace {

using nlohmann::json;

struct Field {
  std::string key;
  std::string description;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void bad_type(const std::string& key, const char* expected) {
  throw ValidationError("config key '" + key + "' must be " + expected);
}

template <class Ref>
Field int_field(std::string key, std::string desc, Ref ref) {
  return {key, std::move(desc), [ref](const RunConfig& c) { return json(ref(c)); },
          [ref, key](RunConfig& c, const json& v) {
            if (!v.is_number_integer()) bad_type(key, "an integer");
            const auto x = v.get<std::int64_t>();
            using T = std::remove_reference_t<decltype(ref(c))>;
            if (x < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
                x > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
              bad_type(key, "an integer in range");
            }
            ref(c) = static_cast<T>(x);
          }};
}

template <class Ref>
Field double_field(std::string key, std::string desc, Ref ref) {
  return {key, std::move(desc), [ref](const RunConfig& c) { return json(ref(c)); },
          [ref, key](RunConfig& c, const json& v) {
            if (!v.is_number()) bad_type(key, "a number");
            ref(c) = v.get<double>();
          }};
}

template <class Ref>
Field path_field(std::string key, std::string desc, Ref ref) {
  return {key, std::move(desc), [ref](const RunConfig& c) { return json(ref(c).string()); },
          [ref, key](RunConfig& c, const json& v) {
            if (!v.is_string()) bad_type(key, "a string");
            ref(c) = v.get<std::string>();
          }};
}

template <class Ref>
Field list_field(std::string key, std::string desc, Ref ref) {
  return {key, std::move(desc), [ref](const RunConfig& c) { return json(ref(c)); },
          [ref, key](RunConfig& c, const json& v) {
            if (!v.is_array()) bad_type(key, "an array of numbers");
            std::vector<double> out;
            for (const auto& x : v) {
              if (!x.is_number()) bad_type(key, "an array of numbers");
              out.push_back(x.get<double>());
            }
            ref(c) = std::move(out);
          }};
}

// The main RBM and the pretraining RBM share one set of knobs.
void add_train_fields(std::vector<Field>& f, const std::string& prefix, const std::string& what,
                      TrainConfig PipelineSpec::*member) {
  auto sub = [member](auto& c) -> auto& { return c.pipeline.*member; };
  f.push_back(int_field(prefix + "epochs", what + " epochs",
                        [sub](auto& c) -> auto& { return sub(c).epochs; }));
  f.push_back(int_field(prefix + "batch_size", what + " mini-batch size",
                        [sub](auto& c) -> auto& { return sub(c).batch_size; }));
  f.push_back(double_field(prefix + "learning_rate", what + " initial learning rate",
                           [sub](auto& c) -> auto& { return sub(c).learning_rate; }));
  f.push_back(double_field(prefix + "momentum", what + " momentum",
                           [sub](auto& c) -> auto& { return sub(c).momentum; }));
  f.push_back(double_field(prefix + "fast_lr_start", what + " fast-weight learning rate at start",
                           [sub](auto& c) -> auto& { return sub(c).fast_lr_start; }));
  f.push_back(double_field(prefix + "fast_lr_end", what + " fast-weight learning rate at end",
                           [sub](auto& c) -> auto& { return sub(c).fast_lr_end; }));
  f.push_back(double_field(prefix + "fast_decay", what + " fast-weight decay factor",
                           [sub](auto& c) -> auto& { return sub(c).fast_decay; }));
  f.push_back(double_field(prefix + "l2", what + " L2 weight penalty",
                           [sub](auto& c) -> auto& { return sub(c).l2; }));
  f.push_back(double_field(prefix + "sparsity_target", what + " target hidden activation",
                           [sub](auto& c) -> auto& { return sub(c).sparsity_target; }));
  f.push_back(double_field(prefix + "sparsity_strength", what + " sparsity penalty strength",
                           [sub](auto& c) -> auto& { return sub(c).sparsity_strength; }));
  f.push_back(double_field(prefix + "dropout_hidden", what + " hidden dropout rate",
                           [sub](auto& c) -> auto& { return sub(c).dropout_hidden; }));
  f.push_back(double_field(prefix + "dropout_visible", what + " visible dropout rate",
                           [sub](auto& c) -> auto& { return sub(c).dropout_visible; }));
  f.push_back(int_field(prefix + "chain_size", what + " persistent chain size",
                        [sub](auto& c) -> auto& { return sub(c).chain_size; }));
  f.push_back(double_field(prefix + "init_std", what + " weight init std-dev",
                           [sub](auto& c) -> auto& { return sub(c).init_std; }));
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"seed", "master seed (MELSEG_SEED and --seed override it)",
                 [](const RunConfig& c) { return json(c.seed); },
                 [](RunConfig& c, const json& v) {
                   if (!v.is_number_unsigned()) bad_type("seed", "a non-negative integer");
                   c.seed = v.get<std::uint64_t>();
                 }});
    f.push_back(int_field("n", "n-gram length", [](auto& c) -> auto& { return c.pipeline.n; }));
    f.push_back(int_field("hidden", "RBM hidden units",
                          [](auto& c) -> auto& { return c.pipeline.hidden; }));
    f.push_back(int_field("extra_hidden", "width of an optional second FFNN hidden layer (0 = none)",
                          [](auto& c) -> auto& { return c.pipeline.extra_hidden; }));
    f.push_back(int_field("folds", "cross-validation folds", [](auto& c) -> auto& { return c.folds; }));
    f.push_back(int_field("threads", "worker threads (outputs do not depend on it)",
                          [](auto& c) -> auto& { return c.pipeline.threads; }));
    f.push_back(double_field("peak_k", "peak-picking k for segment",
                             [](auto& c) -> auto& { return c.peak_k; }));
    f.push_back({"variance", "peak-picker variance: as_printed or standard_weighted",
                 [](const RunConfig& c) { return json(to_string(c.pipeline.variance)); },
                 [](RunConfig& c, const json& v) {
                   if (!v.is_string()) bad_type("variance", "a string");
                   c.pipeline.variance = variance_from_string(v.get<std::string>());
                 }});
    f.push_back(list_field("k_raw", "k values swept for raw IC profiles",
                           [](auto& c) -> auto& { return c.pipeline.k_raw; }));
    f.push_back(list_field("k_smoothed", "k values swept for smoothed profiles",
                           [](auto& c) -> auto& { return c.pipeline.k_smoothed; }));
    f.push_back(int_field("abs_interval_bins", "absolute interval bins",
                          [](auto& c) -> auto& { return c.pipeline.viewpoints.abs_interval_bins; }));
    f.push_back(int_field("contour_bins", "contour bins",
                          [](auto& c) -> auto& { return c.pipeline.viewpoints.contour_bins; }));
    f.push_back(int_field("ioi_bins", "inter-onset interval bins",
                          [](auto& c) -> auto& { return c.pipeline.viewpoints.ioi_bins; }));
    f.push_back(int_field("ooi_bins", "offset-to-onset interval bins",
                          [](auto& c) -> auto& { return c.pipeline.viewpoints.ooi_bins; }));
    add_train_fields(f, "rbm_", "RBM", &PipelineSpec::rbm);
    f.push_back(int_field("sampler_particles", "Gibbs particles per estimate",
                          [](auto& c) -> auto& { return c.pipeline.sampler.particles; }));
    f.push_back(int_field("sampler_gibbs_steps", "Gibbs sweeps per particle",
                          [](auto& c) -> auto& { return c.pipeline.sampler.gibbs_steps; }));
    add_train_fields(f, "pretrain_", "pretraining RBM", &PipelineSpec::pretrain);
    f.push_back(int_field("finetune_epochs", "fine-tune epochs",
                          [](auto& c) -> auto& { return c.pipeline.finetune.epochs; }));
    f.push_back(int_field("finetune_batch_size", "fine-tune mini-batch size",
                          [](auto& c) -> auto& { return c.pipeline.finetune.batch_size; }));
    f.push_back(double_field("finetune_learning_rate", "fine-tune initial learning rate",
                             [](auto& c) -> auto& { return c.pipeline.finetune.learning_rate; }));
    f.push_back(double_field("finetune_momentum", "fine-tune momentum",
                             [](auto& c) -> auto& { return c.pipeline.finetune.momentum; }));
    f.push_back(double_field("finetune_l2", "fine-tune L2 weight penalty",
                             [](auto& c) -> auto& { return c.pipeline.finetune.l2; }));
    f.push_back(double_field("finetune_dropout_hidden", "fine-tune hidden dropout rate",
                             [](auto& c) -> auto& { return c.pipeline.finetune.dropout_hidden; }));
    f.push_back(double_field("finetune_dropout_input", "fine-tune input dropout rate",
                             [](auto& c) -> auto& { return c.pipeline.finetune.dropout_input; }));
    f.push_back(path_field("corpus", "corpus directory or manifest",
                           [](auto& c) -> auto& { return c.corpus; }));
    f.push_back(path_field("out_dir", "output directory for cv/synth",
                           [](auto& c) -> auto& { return c.out_dir; }));
    return f;
  }();
  return table;
}

}  // namespace

VarianceFormula variance_from_string(const std::string& name) {
  if (name == "as_printed") return VarianceFormula::AsPrinted;
  if (name == "standard_weighted") return VarianceFormula::StandardWeighted;
  throw ValidationError("unknown variance formula '" + name +
                        "' (expected as_printed or standard_weighted)");
}

std::string to_string(VarianceFormula v) {
  return v == VarianceFormula::AsPrinted ? "as_printed" : "standard_weighted";
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(std::string_view json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    const auto it = std::find_if(fields().begin(), fields().end(),
                                 [&key = key](const Field& f) { return f.key == key; });
    if (it == fields().end()) throw ValidationError("unknown config key '" + key + "'");
    it->set(base, value);
  }
  validate_run_config(base);
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  try {
    return parse_run_config(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void validate_run_config(const RunConfig& cfg) {
  const auto& p = cfg.pipeline;
  if (p.n < 1) throw ValidationError("config key 'n' must be >= 1");
  if (p.hidden < 1) throw ValidationError("config key 'hidden' must be >= 1");
  if (p.extra_hidden < 0) throw ValidationError("config key 'extra_hidden' must be >= 0");
  if (cfg.folds < 2) throw ValidationError("config key 'folds' must be >= 2");
  if (p.threads < 1) throw ValidationError("config key 'threads' must be >= 1");
  if (!(cfg.peak_k >= 0.0)) throw ValidationError("config key 'peak_k' must be >= 0");
  if (p.k_raw.empty()) throw ValidationError("config key 'k_raw' must not be empty");
  if (p.k_smoothed.empty()) throw ValidationError("config key 'k_smoothed' must not be empty");
  try {
    p.viewpoints.validate();
    p.rbm.validate();
    p.pretrain.validate();
    p.sampler.validate();
    p.finetune.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

std::string run_config_to_json(const RunConfig& cfg) {
  json doc = json::object();
  for (const auto& f : fields()) doc[f.key] = f.get(cfg);
  return doc.dump(2) + "\n";
}

std::string run_config_key_help() {
  const RunConfig defaults;
  std::size_t width = 0;
  for (const auto& f : fields()) width = std::max(width, f.key.size());
  std::string out;
  for (const auto& f : fields()) {
    out += "  " + f.key + std::string(width + 2 - f.key.size(), ' ') + f.get(defaults).dump() +
           "  " + f.description + "\n";
  }
  return out;
}

std::uint64_t resolve_seed(const RunConfig& cfg, const std::uint64_t* flag_value) {
  if (flag_value) return *flag_value;
  if (const char* env = std::getenv("MELSEG_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const auto v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') {
      throw ValidationError(std::string("MELSEG_SEED is not a non-negative integer: '") + env + "'");
    }
    return v;
  }
  return cfg.seed;
}

}  // namespace melseg::cli
