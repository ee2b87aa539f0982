#include "job.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "topothermo/morse.hpp"

namespace topothermo::cli {

using nlohmann::json;

namespace {

double parse_real(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(Errc::config_error, "option '" + key + "' expects a number, got '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& s) {
  std::int64_t x = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc{} || ptr != end) {
    // accept 1e6-style counts when they are integral
    const double d = parse_real(key, s);
    if (d != static_cast<double>(static_cast<std::int64_t>(d)))
      throw Error(Errc::config_error, "option '" + key + "' expects an integer, got '" + s + "'");
    return static_cast<std::int64_t>(d);
  }
  return x;
}

bool type_matches(ValueKind kind, const json& v) {
  switch (kind) {
    case ValueKind::real: return v.is_number();
    case ValueKind::integer: return v.is_number_integer() || (v.is_number() && v.get<double>() == static_cast<double>(static_cast<std::int64_t>(v.get<double>())));
    case ValueKind::text: return v.is_string();
    case ValueKind::flag: return v.is_boolean();
    case ValueKind::assignments: return v.is_object();
    case ValueKind::reals:
    case ValueKind::integers:
      if (v.is_number()) return true;
      if (!v.is_array()) return false;
      return std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
  }
  return false;
}

const char* kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::real: return "a number";
    case ValueKind::integer: return "an integer";
    case ValueKind::text: return "a string";
    case ValueKind::flag: return "a boolean";
    case ValueKind::assignments: return "an object";
    case ValueKind::reals:
    case ValueKind::integers: return "a list of numbers";
  }
  return "?";
}

}  // namespace

std::vector<OptionSpec> model_options() {
  return {
      {"model", ValueKind::text, "model kind (harmonic, double_well, phi4, xy, dsl) or a model object in the config"},
      {"N", ValueKind::integer, "number of degrees of freedom"},
      {"param", ValueKind::assignments, "model parameter name=value (repeatable)"},
      {"dsl", ValueKind::text, "potential source for --model dsl"},
      {"box", ValueKind::reals, "domain box lo,hi applied to every coordinate"},
      {"perturb", ValueKind::reals, "linear tilt coefficients, one per coordinate"},
  };
}

std::vector<OptionSpec> common_options() {
  return {
      {"seed", ValueKind::integer, "random seed"},
      {"workers", ValueKind::integer, "worker threads (default: TOPOTHERMO_WORKERS or 1)"},
      {"output", ValueKind::text, "output file (default: stdout)"},
  };
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_error, "'" + path + "' is not valid JSON: " + e.what());
  }
}

json convert_value(const OptionSpec& spec, const std::vector<std::string>& raw) {
  switch (spec.kind) {
    case ValueKind::real: return parse_real(spec.key, raw.at(0));
    case ValueKind::integer: return parse_int(spec.key, raw.at(0));
    case ValueKind::text: return raw.at(0);
    case ValueKind::flag: return true;
    case ValueKind::reals: {
      json a = json::array();
      for (const auto& s : raw) a.push_back(parse_real(spec.key, s));
      return a;
    }
    case ValueKind::integers: {
      json a = json::array();
      for (const auto& s : raw) a.push_back(parse_int(spec.key, s));
      return a;
    }
    case ValueKind::assignments: {
      json o = json::object();
      for (const auto& s : raw) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
          throw Error(Errc::config_error, "option '" + spec.key + "' expects name=value, got '" + s + "'");
        o[s.substr(0, eq)] = parse_real(spec.key, s.substr(eq + 1));
      }
      return o;
    }
  }
  return nullptr;
}

json merge_job(const json& config, const std::vector<OptionSpec>& specs,
               const std::map<std::string, std::vector<std::string>>& given) {
  if (!config.is_object()) throw Error(Errc::config_error, "config must be a JSON object");
  json job = json::object();
  for (const auto& [key, value] : config.items()) {
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const OptionSpec& s) { return s.key == key; });
    if (it == specs.end()) throw Error(Errc::config_error, "unknown key '" + key + "' in config");
    const bool model_object = key == "model" && value.is_object();
    if (!model_object && !type_matches(it->kind, value))
      throw Error(Errc::config_error, "config key '" + key + "' must be " + kind_name(it->kind));
    job[key] = value;
  }
  for (const auto& spec : specs) {
    const auto it = given.find(spec.key);
    if (it == given.end()) continue;
    json v = convert_value(spec, it->second);
    if (spec.kind == ValueKind::assignments && job.contains(spec.key))
      job[spec.key].update(v);
    else
      job[spec.key] = std::move(v);
  }
  return job;
}

std::string config_hash(const json& job) {
  json canon = job;
  canon.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon.dump())));
  return buf;
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::config_error:
    case Errc::io_error: return kExitUsage;
    case Errc::syntax_error:
    case Errc::index_error:
    case Errc::unknown_identifier:
    case Errc::domain_error:
    case Errc::edge_index:
    case Errc::dimension_too_small:
    case Errc::incomplete_catalog: return kExitInput;
    default: return kExitNumerical;
  }
}

double get_real(const json& job, const std::string& key, double fallback) {
  return job.contains(key) ? job.at(key).get<double>() : fallback;
}

double require_real(const json& job, const std::string& key) {
  if (!job.contains(key)) throw Error(Errc::config_error, "missing required option '" + key + "'");
  return job.at(key).get<double>();
}

std::int64_t get_int(const json& job, const std::string& key, std::int64_t fallback) {
  if (!job.contains(key)) return fallback;
  const auto& v = job.at(key);
  return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
}

std::string get_text(const json& job, const std::string& key, const std::string& fallback) {
  return job.contains(key) ? job.at(key).get<std::string>() : fallback;
}

std::vector<double> get_reals(const json& job, const std::string& key, std::vector<double> fallback) {
  if (!job.contains(key)) return fallback;
  const auto& v = job.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

bool get_flag(const json& job, const std::string& key) { return job.contains(key) && job.at(key).get<bool>(); }

PotentialModel build_model(const json& job, std::optional<std::size_t> N_override) {
  if (!job.contains("model")) throw Error(Errc::config_error, "missing required option 'model'");
  json spec;
  if (job.at("model").is_object()) {
    spec = job.at("model");
  } else {
    spec = {{"kind", job.at("model").get<std::string>()}};
    if (job.contains("N")) spec["N"] = get_int(job, "N", 0);
    if (job.contains("param")) spec["parameters"] = job.at("param");
    if (job.contains("dsl")) spec["source"] = job.at("dsl");
    if (job.contains("box")) {
      const auto b = get_reals(job, "box", {});
      if (b.size() != 2) throw Error(Errc::config_error, "box expects two numbers lo,hi");
      spec["domain_box"] = b;
    }
  }
  if (N_override) spec["N"] = *N_override;
  if (spec.contains("N") && spec.at("N").is_number_integer() && spec.at("N").get<std::int64_t>() <= 0)
    throw Error(Errc::config_error, "N must be positive");
  PotentialModel model = model_from_json(spec);
  if (job.contains("perturb")) {
    const auto a = get_reals(job, "perturb", {});
    if (a.size() != model.dimension())
      throw Error(Errc::config_error, "perturb needs " + std::to_string(model.dimension()) + " coefficients");
    model = perturb_degenerate(model, a);
  }
  return model;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace topothermo::cli
