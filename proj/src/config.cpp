#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "invertor/error.hpp"
#include "invertor/harness.hpp"

namespace invertor {
namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys{
    "simulator",   "method",         "iterations",   "particles",        "inner_sweeps",
    "mh_per_cycle", "cycles",        "site_mode",    "resampling",       "gamma",
    "norm",        "horizon",        "runs",         "base_seed",        "data_path",
    "oracle_data", "output_dir",     "parallel_chains", "terminal_penalty", "grid_size",
    "sample_spacing", "compensation", "check_oracle", "label"};

std::string key_name(std::string_view key) { return "'" + std::string(key) + "'"; }

const json* find(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, std::string_view key) {
  const json* value = find(obj, key);
  if (value == nullptr) throw ConfigError("missing required key " + key_name(key));
  return *value;
}

std::uint64_t as_uint(const json& value, std::string_view key) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  throw ConfigError("key " + key_name(key) + " must be a non-negative integer");
}

double as_double(const json& value, std::string_view key) {
  if (!value.is_number()) throw ConfigError("key " + key_name(key) + " must be a number");
  return value.get<double>();
}

std::string as_string(const json& value, std::string_view key) {
  if (!value.is_string()) throw ConfigError("key " + key_name(key) + " must be a string");
  return value.get<std::string>();
}

bool as_bool(const json& value, std::string_view key) {
  if (!value.is_boolean()) throw ConfigError("key " + key_name(key) + " must be true or false");
  return value.get<bool>();
}

template <typename T, typename Convert>
void read_optional(const json& obj, std::string_view key, T& target, Convert convert) {
  if (const json* value = find(obj, key)) target = static_cast<T>(convert(*value, key));
}

Norm parse_norm(std::string_view name) {
  if (name == "euclidean") return Norm::euclidean;
  if (name == "length_normalized") return Norm::length_normalized;
  throw ConfigError("unknown norm '" + std::string(name) + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& text) {
  std::filesystem::path p(text);
  return p.is_absolute() ? p.lexically_normal() : (base / p).lexically_normal();
}

}  // namespace

std::string_view to_string(SimulatorKind kind) {
  return kind == SimulatorKind::lobe ? "lobe" : "oracle";
}

SimulatorKind parse_simulator_kind(std::string_view name) {
  if (name == "lobe") return SimulatorKind::lobe;
  if (name == "oracle") return SimulatorKind::oracle;
  throw ConfigError("unknown simulator '" + std::string(name) + "'");
}

ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key " + key_name(key));
  }

  ExperimentConfig config;
  config.simulator = parse_simulator_kind(as_string(require(obj, "simulator"), "simulator"));
  config.method.kind = parse_method_kind(as_string(require(obj, "method"), "method"));
  read_optional(obj, "iterations", config.method.iterations, as_uint);
  read_optional(obj, "particles", config.method.particles, as_uint);
  read_optional(obj, "inner_sweeps", config.method.inner_sweeps, as_uint);
  read_optional(obj, "mh_per_cycle", config.method.mh_per_cycle, as_uint);
  read_optional(obj, "cycles", config.method.cycles, as_uint);
  if (const json* v = find(obj, "site_mode")) {
    config.method.site_mode = parse_site_mode(as_string(*v, "site_mode"));
  }
  if (const json* v = find(obj, "resampling")) {
    config.method.resampling = parse_resampling(as_string(*v, "resampling"));
  }
  validate(config.method);

  config.kernel.gamma = as_double(require(obj, "gamma"), "gamma");
  if (const json* v = find(obj, "norm")) config.kernel.norm = parse_norm(as_string(*v, "norm"));
  validate(config.kernel);

  config.runs = as_uint(require(obj, "runs"), "runs");
  if (config.runs == 0) throw ConfigError("runs must be at least 1");
  config.base_seed = as_uint(require(obj, "base_seed"), "base_seed");
  read_optional(obj, "parallel_chains", config.parallel_chains, as_uint);
  if (config.parallel_chains == 0) throw ConfigError("parallel_chains must be at least 1");
  if (const json* v = find(obj, "output_dir")) {
    config.output_dir = resolve(base_dir, as_string(*v, "output_dir"));
  }
  read_optional(obj, "check_oracle", config.check_oracle, as_bool);
  config.label = std::string(to_string(config.method.kind));
  read_optional(obj, "label", config.label, as_string);

  if (config.simulator == SimulatorKind::lobe) {
    for (const char* key : {"oracle_data", "check_oracle"}) {
      if (find(obj, key)) throw ConfigError("key " + key_name(key) + " needs simulator 'oracle'");
    }
    config.horizon = as_uint(require(obj, "horizon"), "horizon");
    if (config.horizon == 0) throw ConfigError("horizon must be at least 1");
    config.data_path = resolve(base_dir, as_string(require(obj, "data_path"), "data_path"));
    if (!std::filesystem::is_regular_file(config.data_path)) {
      throw ConfigError("data_path " + config.data_path.string() + " does not exist");
    }
    config.lobe.terminal_penalty = true;
    read_optional(obj, "terminal_penalty", config.lobe.terminal_penalty, as_bool);
    read_optional(obj, "grid_size", config.lobe.grid_size, as_uint);
    read_optional(obj, "sample_spacing", config.lobe.sample_spacing, as_double);
    read_optional(obj, "compensation", config.lobe.compensation, as_double);
    if (!(config.lobe.compensation >= 0.0 && std::isfinite(config.lobe.compensation))) {
      throw ConfigError("compensation must be a finite non-negative number");
    }
  } else {
    for (const char* key : {"data_path", "terminal_penalty", "grid_size", "sample_spacing",
                            "compensation"}) {
      if (find(obj, key)) throw ConfigError("key " + key_name(key) + " needs simulator 'lobe'");
    }
    const json& data = require(obj, "oracle_data");
    if (!data.is_array() || data.empty()) {
      throw ConfigError("key 'oracle_data' must be a non-empty array of numbers");
    }
    for (const auto& o : data) config.oracle_data.push_back(as_double(o, "oracle_data"));
    config.horizon = config.oracle_data.size();
    if (const json* v = find(obj, "horizon"); v && as_uint(*v, "horizon") != config.horizon) {
      throw ConfigError("horizon does not match the length of oracle_data");
    }
  }
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config_text(text.str(), base);
}

}  // namespace invertor
