#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topothermo/errors.hpp"
#include "topothermo/potential.hpp"

namespace topothermo::cli {

// Job configuration: a JSON object whose keys are the long option names of
// a subcommand (dashes replaced by underscores). Values from the command
// line override the config file.

enum class ValueKind { real, integer, text, reals, integers, flag, assignments };

struct OptionSpec {
  std::string key;
  ValueKind kind;
  std::string help;
};

/// Option specs shared by every model-driven subcommand.
std::vector<OptionSpec> model_options();
std::vector<OptionSpec> common_options();

/// Reads a JSON object from disk. ConfigError on malformed JSON, IOError
/// when the file cannot be read.
nlohmann::json load_json_file(const std::string& path);

/// Converts raw command-line strings for one option.
nlohmann::json convert_value(const OptionSpec& spec, const std::vector<std::string>& raw);

/// Rejects unknown keys and type mismatches in `config`, then overlays the
/// options given on the command line. `assignments` options merge key-wise.
nlohmann::json merge_job(const nlohmann::json& config, const std::vector<OptionSpec>& specs,
                         const std::map<std::string, std::vector<std::string>>& given);

/// FNV-1a of the canonical dump of the job without its output path.
std::string config_hash(const nlohmann::json& job);

/// Exit status for a library error category.
int exit_code(Errc code);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumerical = 4;

double get_real(const nlohmann::json& job, const std::string& key, double fallback);
double require_real(const nlohmann::json& job, const std::string& key);
std::int64_t get_int(const nlohmann::json& job, const std::string& key, std::int64_t fallback);
std::string get_text(const nlohmann::json& job, const std::string& key, const std::string& fallback);
std::vector<double> get_reals(const nlohmann::json& job, const std::string& key, std::vector<double> fallback);
bool get_flag(const nlohmann::json& job, const std::string& key);

/// Model from the job: either `model` as a full JSON model object, or
/// `model` as a kind name with `N`, `param`, `dsl`, `box`. `perturb`
/// applies a linear tilt. `N_override` replaces N (scaling families).
PotentialModel build_model(const nlohmann::json& job, std::optional<std::size_t> N_override = std::nullopt);

/// ISO-8601 UTC time of the call.
std::string utc_timestamp();

}  // namespace topothermo::cli
