#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ufprog/config.hpp"
#include "ufprog/types.hpp"

namespace ufprog {

// Timestamps are auto-detected once per file from the first data row:
// if the whole field parses as a number it is taken as epoch seconds,
// otherwise every row must carry an RFC-3339 date-time.
enum class TimestampKind { epoch_seconds, rfc3339 };

std::optional<double> parse_rfc3339(const std::string& text);
std::optional<double> parse_epoch_seconds(const std::string& text);

SensorSeries parse_sensor_csv(std::istream& input, const ColumnMapping& mapping,
                              char delimiter, Diagnostics& diag,
                              std::string source_id = "stream");

SensorSeries load_sensor_csv(const std::string& path,
                             const PipelineConfig& config, Diagnostics& diag);

// Sorts by timestamp, collapses exact-duplicate timestamps keeping the record
// seen last, flags negative pressures and flows, and fills sampling_hint with
// the median inter-record gap.
SensorSeries validate_series(SensorSeries series, Diagnostics& diag);

void write_sensor_csv(std::ostream& out, const SensorSeries& series,
                      const ColumnMapping& mapping, char delimiter);

}  // namespace ufprog
