#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <stdexcept>

#include "melseg/error.hpp"
#include "melseg/evalharness.hpp"

namespace melseg::cli {

// Everything a command may need, as one flat key/value document.
struct RunConfig {
  std::uint64_t seed = 1;
  int folds = 5;
  double peak_k = 1.0;
  // n, hidden, threads, viewpoints, model/sampler/fine-tune settings, k sets
  // and the variance formula all live here.
  PipelineSpec pipeline;

  std::filesystem::path corpus;
  std::filesystem::path out_dir;
};

// Thrown for anything the user has to fix in their input: bad flags, bad
// config documents, missing files.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig default_run_config();

// Parses a flat JSON object onto `base`. Unknown keys, non-scalar values
// (other than the k lists) and type mismatches raise ValidationError naming
// the key.
RunConfig parse_run_config(std::string_view json_text, RunConfig base = default_run_config());
RunConfig load_run_config(const std::filesystem::path& path);

// Range and consistency checks; ValidationError on failure.
void validate_run_config(const RunConfig& cfg);

std::string run_config_to_json(const RunConfig& cfg);

// "key  default  description" lines for every config key.
std::string run_config_key_help();

// Seed precedence: explicit flag, then MELSEG_SEED, then the config value.
std::uint64_t resolve_seed(const RunConfig& cfg, const std::uint64_t* flag_value);

VarianceFormula variance_from_string(const std::string& name);
std::string to_string(VarianceFormula v);

}  // namespace melseg::cli
