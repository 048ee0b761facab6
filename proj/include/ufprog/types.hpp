#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace ufprog {

// One raw plant-log record. Units are fixed: pressures in psi, flows in
// gallons per minute, temperature in degrees Celsius. There is no unit
// conversion layer; feeding data in other units is a configuration error
// on the operator's side.
struct SensorRecord {
  double timestamp = 0.0;  // seconds since the Unix epoch
  double feed_pressure = 0.0;
  double filtrate_pressure = 0.0;
  double filtrate_flow = 0.0;
  double temperature = 0.0;
  double backwash_flow = 0.0;
  // Extra channels (turbidity, pH, coagulant dose, ...) carried opaquely.
  // They never enter any computed feature.
  std::map<std::string, std::string> extras;
};

struct SensorSeries {
  std::vector<SensorRecord> records;
  std::string source_id;
  double sampling_hint = 0.0;  // median inter-record gap in seconds
};

// Counters accumulated across pipeline stages; attached to artifacts so an
// operator can see what was silently repaired or skipped.
struct Diagnostics {
  std::size_t dropped_rows = 0;            // unparseable rows at ingest
  std::size_t duplicate_timestamps = 0;    // collapsed by validation
  std::size_t negative_value_records = 0;  // negative pressure/flow, kept
  std::size_t negative_tmp_records = 0;    // per-record TMP below zero, kept
  std::size_t skipped_queries = 0;         // queries with short history
  std::size_t zero_similarity_fallbacks = 0;
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }

  void merge_from(const Diagnostics& other) {
    dropped_rows += other.dropped_rows;
    duplicate_timestamps += other.duplicate_timestamps;
    negative_value_records += other.negative_value_records;
    negative_tmp_records += other.negative_tmp_records;
    skipped_queries += other.skipped_queries;
    zero_similarity_fallbacks += other.zero_similarity_fallbacks;
    warnings.insert(warnings.end(), other.warnings.begin(),
                    other.warnings.end());
  }
};

}  // namespace ufprog
