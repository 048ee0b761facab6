#include "ufprog/config.hpp"

#include <cstdio>
#include <fstream>

#include "ufprog/errors.hpp"

namespace ufprog {

namespace {

template <typename T>
void read_if_present(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("config field '") + key +
                        "' has the wrong type");
    }
  }
}

}  // namespace

void PipelineConfig::validate() const {
  weights.validate();
  if (backwash_threshold_gpm <= 0.0) {
    throw ConfigError("backwash_threshold_gpm must be positive");
  }
  if (min_cycle_samples == 0) {
    throw ConfigError("min_cycle_samples must be at least 1");
  }
  if (hi_jump_threshold <= 0.0) {
    throw ConfigError("hi_jump_threshold must be positive");
  }
  if (max_gap_hours <= 0.0) {
    throw ConfigError("max_gap_hours must be positive");
  }
  if (eps <= 0.0) {
    throw ConfigError("eps must be positive");
  }
  if (hi_max <= hi_min) {
    throw ConfigError("hi membership range is empty");
  }
  if (dhi_max <= dhi_min) {
    throw ConfigError("dhi membership range is empty");
  }
  if (window_length == 0) {
    throw ConfigError("window_length must be at least 1");
  }
  if (top_k == 0) {
    throw ConfigError("top_k must be at least 1");
  }
  if (interval_level <= 0.0 || interval_level >= 1.0) {
    throw ConfigError("interval_level must lie in (0, 1)");
  }
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["columns"] = {{"timestamp", columns.timestamp},
                  {"feed_pressure", columns.feed_pressure},
                  {"filtrate_pressure", columns.filtrate_pressure},
                  {"filtrate_flow", columns.filtrate_flow},
                  {"temperature", columns.temperature},
                  {"backwash_flow", columns.backwash_flow}};
  j["delimiter"] = std::string(1, delimiter);
  j["backwash_threshold_gpm"] = backwash_threshold_gpm;
  j["min_cycle_samples"] = min_cycle_samples;
  j["hi_jump_threshold"] = hi_jump_threshold;
  j["max_gap_hours"] = max_gap_hours;
  j["failure_hi"] = failure_hi;
  j["weights"] = {{"resistance", weights.resistance},
                  {"tmp", weights.tmp},
                  {"flux", weights.flux},
                  {"recovery", weights.recovery}};
  j["eps"] = eps;
  j["constant_feature_fill"] = constant_feature_fill;
  j["hi_min"] = hi_min;
  j["hi_max"] = hi_max;
  j["dhi_min"] = dhi_min;
  j["dhi_max"] = dhi_max;
  j["window_length"] = window_length;
  j["top_k"] = top_k;
  j["interval_level"] = interval_level;
  j["train_fraction"] = train_fraction;
  j["exclude_same_run"] = exclude_same_run;
  j["seed"] = seed;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  if (auto it = j.find("columns"); it != j.end()) {
    if (!it->is_object()) {
      throw ConfigError("config field 'columns' must be an object");
    }
    read_if_present(*it, "timestamp", cfg.columns.timestamp);
    read_if_present(*it, "feed_pressure", cfg.columns.feed_pressure);
    read_if_present(*it, "filtrate_pressure", cfg.columns.filtrate_pressure);
    read_if_present(*it, "filtrate_flow", cfg.columns.filtrate_flow);
    read_if_present(*it, "temperature", cfg.columns.temperature);
    read_if_present(*it, "backwash_flow", cfg.columns.backwash_flow);
  }
  if (auto it = j.find("delimiter"); it != j.end()) {
    const auto text = it->get<std::string>();
    if (text.size() != 1) {
      throw ConfigError("delimiter must be a single character");
    }
    cfg.delimiter = text[0];
  }
  read_if_present(j, "backwash_threshold_gpm", cfg.backwash_threshold_gpm);
  read_if_present(j, "min_cycle_samples", cfg.min_cycle_samples);
  read_if_present(j, "hi_jump_threshold", cfg.hi_jump_threshold);
  read_if_present(j, "max_gap_hours", cfg.max_gap_hours);
  read_if_present(j, "failure_hi", cfg.failure_hi);
  if (auto it = j.find("weights"); it != j.end()) {
    if (!it->is_object()) {
      throw ConfigError("config field 'weights' must be an object");
    }
    read_if_present(*it, "resistance", cfg.weights.resistance);
    read_if_present(*it, "tmp", cfg.weights.tmp);
    read_if_present(*it, "flux", cfg.weights.flux);
    read_if_present(*it, "recovery", cfg.weights.recovery);
  }
  read_if_present(j, "eps", cfg.eps);
  read_if_present(j, "constant_feature_fill", cfg.constant_feature_fill);
  read_if_present(j, "hi_min", cfg.hi_min);
  read_if_present(j, "hi_max", cfg.hi_max);
  read_if_present(j, "dhi_min", cfg.dhi_min);
  read_if_present(j, "dhi_max", cfg.dhi_max);
  read_if_present(j, "window_length", cfg.window_length);
  read_if_present(j, "top_k", cfg.top_k);
  read_if_present(j, "interval_level", cfg.interval_level);
  read_if_present(j, "train_fraction", cfg.train_fraction);
  read_if_present(j, "exclude_same_run", cfg.exclude_same_run);
  read_if_present(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

std::string PipelineConfig::digest() const {
  return to_hex16(fnv1a64(to_json().dump()));
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return PipelineConfig::from_json(j);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string to_hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

}  // namespace ufprog
