#include "ufprog/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "ufprog/errors.hpp"

namespace ufprog {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == delimiter) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::optional<double> parse_full_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

struct ChannelColumns {
  std::size_t timestamp;
  std::size_t feed_pressure;
  std::size_t filtrate_pressure;
  std::size_t filtrate_flow;
  std::size_t temperature;
  std::size_t backwash_flow;
};

std::size_t require_column(const std::vector<std::string>& header,
                           const std::string& name, const char* channel) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw ConfigError(std::string(channel) + " unmapped (no column '" + name +
                    "' in header)");
}

}  // namespace

std::optional<double> parse_epoch_seconds(const std::string& text) {
  return parse_full_double(text);
}

std::optional<double> parse_rfc3339(const std::string& text) {
  const std::string t = trim(text);
  int year = 0, month = 0, day = 0, hour = 0, minute = 0;
  int consumed = 0;
  if (std::sscanf(t.c_str(), "%4d-%2d-%2d%n", &year, &month, &day, &consumed) != 3 ||
      consumed != 10) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  if (pos >= t.size() || (t[pos] != 'T' && t[pos] != 't' && t[pos] != ' ')) {
    return std::nullopt;
  }
  ++pos;
  double second = 0.0;
  int time_consumed = 0;
  if (std::sscanf(t.c_str() + pos, "%2d:%2d%n", &hour, &minute, &time_consumed) != 2 ||
      time_consumed != 5) {
    return std::nullopt;
  }
  pos += 5;
  if (pos < t.size() && t[pos] == ':') {
    ++pos;
    char* end = nullptr;
    second = std::strtod(t.c_str() + pos, &end);
    if (end == t.c_str() + pos) return std::nullopt;
    pos = static_cast<std::size_t>(end - t.c_str());
  }
  double offset_seconds = 0.0;
  if (pos < t.size()) {
    const char c = t[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = 0, om = 0;
      int off_consumed = 0;
      if (std::sscanf(t.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &off_consumed) != 2 ||
          off_consumed != 5) {
        return std::nullopt;
      }
      offset_seconds = (c == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
      pos += 6;
    } else {
      return std::nullopt;
    }
  }
  if (pos != t.size()) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  if (hour > 23 || minute > 59 || second < 0.0 || second >= 61.0) {
    return std::nullopt;
  }
  const double days = static_cast<double>(
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)));
  return days * 86400.0 + hour * 3600.0 + minute * 60.0 + second - offset_seconds;
}

SensorSeries parse_sensor_csv(std::istream& input, const ColumnMapping& mapping,
                              char delimiter, Diagnostics& diag,
                              std::string source_id) {
  std::string line;
  if (!std::getline(input, line)) {
    throw DataError("input is empty (no header row)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line, delimiter);

  ChannelColumns cols;
  cols.timestamp = require_column(header, mapping.timestamp, "timestamp");
  cols.feed_pressure =
      require_column(header, mapping.feed_pressure, "feed_pressure");
  cols.filtrate_pressure =
      require_column(header, mapping.filtrate_pressure, "filtrate_pressure");
  cols.filtrate_flow =
      require_column(header, mapping.filtrate_flow, "filtrate_flow");
  cols.temperature = require_column(header, mapping.temperature, "temperature");
  cols.backwash_flow =
      require_column(header, mapping.backwash_flow, "backwash_flow");

  std::vector<std::size_t> extra_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != cols.timestamp && i != cols.feed_pressure &&
        i != cols.filtrate_pressure && i != cols.filtrate_flow &&
        i != cols.temperature && i != cols.backwash_flow) {
      extra_cols.push_back(i);
    }
  }

  SensorSeries series;
  series.source_id = std::move(source_id);
  std::optional<TimestampKind> kind;

  while (std::getline(input, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line, delimiter);
    if (fields.size() != header.size()) {
      diag.dropped_rows += 1;
      continue;
    }
    if (!kind) {
      kind = parse_epoch_seconds(fields[cols.timestamp])
                 ? TimestampKind::epoch_seconds
                 : TimestampKind::rfc3339;
    }
    const std::optional<double> ts =
        *kind == TimestampKind::epoch_seconds
            ? parse_epoch_seconds(fields[cols.timestamp])
            : parse_rfc3339(fields[cols.timestamp]);
    const auto feed = parse_full_double(fields[cols.feed_pressure]);
    const auto filtrate = parse_full_double(fields[cols.filtrate_pressure]);
    const auto flow = parse_full_double(fields[cols.filtrate_flow]);
    const auto temp = parse_full_double(fields[cols.temperature]);
    const auto backwash = parse_full_double(fields[cols.backwash_flow]);
    if (!ts || !feed || !filtrate || !flow || !temp || !backwash) {
      diag.dropped_rows += 1;
      continue;
    }
    SensorRecord rec;
    rec.timestamp = *ts;
    rec.feed_pressure = *feed;
    rec.filtrate_pressure = *filtrate;
    rec.filtrate_flow = *flow;
    rec.temperature = *temp;
    rec.backwash_flow = *backwash;
    for (std::size_t i : extra_cols) {
      rec.extras.emplace(trim(header[i]), fields[i]);
    }
    series.records.push_back(std::move(rec));
  }

  if (series.records.empty()) {
    throw DataError("no valid data rows in input");
  }
  return series;
}

SensorSeries load_sensor_csv(const std::string& path,
                             const PipelineConfig& config, Diagnostics& diag) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open input file: " + path);
  }
  return parse_sensor_csv(in, config.columns, config.delimiter, diag, path);
}

SensorSeries validate_series(SensorSeries series, Diagnostics& diag) {
  std::stable_sort(series.records.begin(), series.records.end(),
                   [](const SensorRecord& a, const SensorRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  std::vector<SensorRecord> kept;
  kept.reserve(series.records.size());
  for (SensorRecord& rec : series.records) {
    if (!kept.empty() && kept.back().timestamp == rec.timestamp) {
      diag.duplicate_timestamps += 1;
      kept.back() = std::move(rec);
    } else {
      kept.push_back(std::move(rec));
    }
  }
  series.records = std::move(kept);

  for (const SensorRecord& rec : series.records) {
    if (rec.feed_pressure < 0.0 || rec.filtrate_pressure < 0.0 ||
        rec.filtrate_flow < 0.0 || rec.backwash_flow < 0.0) {
      diag.negative_value_records += 1;
    }
  }

  if (series.records.size() < 2) {
    series.sampling_hint = 0.0;
  } else {
    std::vector<double> gaps;
    gaps.reserve(series.records.size() - 1);
    for (std::size_t i = 1; i < series.records.size(); ++i) {
      gaps.push_back(series.records[i].timestamp -
                     series.records[i - 1].timestamp);
    }
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    series.sampling_hint = (gaps.size() % 2 == 1)
                               ? gaps[mid]
                               : 0.5 * (gaps[mid - 1] + gaps[mid]);
  }
  return series;
}

void write_sensor_csv(std::ostream& out, const SensorSeries& series,
                      const ColumnMapping& mapping, char delimiter) {
  std::vector<std::string> extra_keys;
  if (!series.records.empty()) {
    for (const auto& [key, value] : series.records.front().extras) {
      extra_keys.push_back(key);
    }
  }
  out << mapping.timestamp << delimiter << mapping.feed_pressure << delimiter
      << mapping.filtrate_pressure << delimiter << mapping.filtrate_flow
      << delimiter << mapping.temperature << delimiter << mapping.backwash_flow;
  for (const std::string& key : extra_keys) {
    out << delimiter << key;
  }
  out << "\n";
  char buf[32];
  const auto field = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const SensorRecord& rec : series.records) {
    field(rec.timestamp);
    out << delimiter;
    field(rec.feed_pressure);
    out << delimiter;
    field(rec.filtrate_pressure);
    out << delimiter;
    field(rec.filtrate_flow);
    out << delimiter;
    field(rec.temperature);
    out << delimiter;
    field(rec.backwash_flow);
    for (const std::string& key : extra_keys) {
      out << delimiter;
      auto it = rec.extras.find(key);
      out << (it == rec.extras.end() ? "" : it->second);
    }
    out << "\n";
  }
}

}  // namespace ufprog
