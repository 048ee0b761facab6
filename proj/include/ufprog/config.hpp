#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ufprog/features.hpp"

namespace ufprog {

// Maps logical channel names to CSV column headers. Empty string means the
// channel must be resolved before ingest can run.
struct ColumnMapping {
  std::string timestamp = "timestamp";
  std::string feed_pressure = "feed_pressure";
  std::string filtrate_pressure = "filtrate_pressure";
  std::string filtrate_flow = "filtrate_flow";
  std::string temperature = "temperature";
  std::string backwash_flow = "backwash_flow";
};

struct PipelineConfig {
  ColumnMapping columns;
  char delimiter = ',';

  double backwash_threshold_gpm = 15.0;
  std::size_t min_cycle_samples = 3;

  double hi_jump_threshold = 0.5;
  double max_gap_hours = 24.0;
  double failure_hi = 0.01;

  HealthWeights weights;
  double eps = 1e-9;
  double constant_feature_fill = 0.0;

  double hi_min = 0.0;
  double hi_max = 1.0;
  double dhi_min = -1.0;
  double dhi_max = 1.0;

  std::size_t window_length = 20;
  std::size_t top_k = 10;
  double interval_level = 0.8;

  double train_fraction = 0.8;
  bool exclude_same_run = true;

  std::uint64_t seed = 77003;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);

  // Stable 16-hex-digit fingerprint of every field above. Artifacts carry it
  // so mismatched pipeline stages are refused instead of silently mixed.
  std::string digest() const;
};

PipelineConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex16(std::uint64_t value);

}  // namespace ufprog
