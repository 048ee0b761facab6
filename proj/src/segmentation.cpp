#include "ufprog/segmentation.hpp"

#include <algorithm>

#include "ufprog/errors.hpp"

namespace ufprog {

const char* to_string(RunStartReason reason) {
  switch (reason) {
    case RunStartReason::series_start: return "series_start";
    case RunStartReason::hi_jump: return "hi_jump";
    case RunStartReason::time_gap: return "time_gap";
  }
  return "unknown";
}

const char* to_string(RunEndReason reason) {
  switch (reason) {
    case RunEndReason::failure: return "failure";
    case RunEndReason::next_recovery: return "next_recovery";
    case RunEndReason::series_end: return "series_end";
  }
  return "unknown";
}

RunStartReason start_reason_from_string(const std::string& text) {
  if (text == "series_start") return RunStartReason::series_start;
  if (text == "hi_jump") return RunStartReason::hi_jump;
  if (text == "time_gap") return RunStartReason::time_gap;
  throw DataError("unknown run start reason: " + text);
}

RunEndReason end_reason_from_string(const std::string& text) {
  if (text == "failure") return RunEndReason::failure;
  if (text == "next_recovery") return RunEndReason::next_recovery;
  if (text == "series_end") return RunEndReason::series_end;
  throw DataError("unknown run end reason: " + text);
}

std::vector<BackwashEvent> detect_backwash_events(const SensorSeries& series,
                                                  double threshold_gpm) {
  std::vector<BackwashEvent> events;
  const auto& records = series.records;
  std::size_t i = 0;
  while (i < records.size()) {
    if (records[i].backwash_flow < threshold_gpm) {
      ++i;
      continue;
    }
    BackwashEvent event;
    event.begin = i;
    event.onset_time = records[i].timestamp;
    event.peak_flow = records[i].backwash_flow;
    while (i < records.size() && records[i].backwash_flow >= threshold_gpm) {
      event.peak_flow = std::max(event.peak_flow, records[i].backwash_flow);
      ++i;
    }
    event.end = i;
    events.push_back(event);
  }
  return events;
}

std::vector<CycleSlice> segment_cycles(const SensorSeries& series,
                                       std::span<const BackwashEvent> events,
                                       std::size_t min_cycle_samples,
                                       Diagnostics& diag) {
  std::vector<CycleSlice> cycles;
  if (events.size() < 2) {
    diag.warn("fewer than 2 backwash events in '" + series.source_id +
              "'; no cycles segmented");
    return cycles;
  }
  if (events.front().begin >= min_cycle_samples) {
    cycles.push_back({0, events.front().end});
  }
  for (std::size_t i = 1; i < events.size(); ++i) {
    cycles.push_back({events[i - 1].end, events[i].end});
  }
  return cycles;
}

namespace {

struct RunBoundary {
  std::size_t begin;
  RunStartReason reason;
};

std::vector<RunBoundary> find_boundaries(std::span<const CycleFeatures> features,
                                         std::span<const NormalizedCycle> global_hi,
                                         double hi_jump, double max_gap_hours) {
  std::vector<RunBoundary> bounds;
  const double max_gap_seconds = max_gap_hours * 3600.0;
  for (std::size_t t = 0; t < features.size(); ++t) {
    if (t == 0) {
      bounds.push_back({t, RunStartReason::series_start});
      continue;
    }
    const double gap = features[t].start_time - features[t - 1].end_time;
    if (gap > max_gap_seconds) {
      bounds.push_back({t, RunStartReason::time_gap});
      continue;
    }
    if (global_hi[t].hi - global_hi[t - 1].hi > hi_jump) {
      bounds.push_back({t, RunStartReason::hi_jump});
    }
  }
  return bounds;
}

}  // namespace

std::vector<Run> group_runs(std::span<const CycleFeatures> features,
                            const PipelineConfig& config) {
  std::vector<Run> runs;
  if (features.empty()) return runs;

  const std::vector<NormalizedCycle> global_hi =
      normalize_run(features, config.weights, config.constant_feature_fill);
  const std::vector<RunBoundary> bounds = find_boundaries(
      features, global_hi, config.hi_jump_threshold, config.max_gap_hours);

  for (std::size_t b = 0; b < bounds.size(); ++b) {
    const std::size_t begin = bounds[b].begin;
    const std::size_t end =
        (b + 1 < bounds.size()) ? bounds[b + 1].begin : features.size();
    Run run;
    run.run_id = b;
    run.start_reason = bounds[b].reason;
    run.features.assign(features.begin() + begin, features.begin() + end);
    run.cycles = normalize_run(run.features, config.weights,
                               config.constant_feature_fill);
    run.end_reason = (b + 1 < bounds.size()) ? RunEndReason::next_recovery
                                             : RunEndReason::series_end;
    runs.push_back(std::move(run));
  }
  for (Run& run : runs) {
    label_rul(run, config.failure_hi);
  }
  return runs;
}

void label_rul(Run& run, double failure_hi) {
  std::size_t failure_index = run.cycles.size();
  for (std::size_t t = 0; t < run.cycles.size(); ++t) {
    if (run.cycles[t].hi <= failure_hi) {
      failure_index = t;
      break;
    }
  }
  if (failure_index == run.cycles.size()) {
    run.reached_failure = false;
    run.rul_labels.clear();
    return;
  }
  run.reached_failure = true;
  run.end_reason = RunEndReason::failure;
  run.features.resize(failure_index + 1);
  run.cycles.resize(failure_index + 1);
  run.rul_labels.resize(failure_index + 1);
  for (std::size_t t = 0; t <= failure_index; ++t) {
    run.rul_labels[t] = static_cast<int>(failure_index - t);
  }
}

std::vector<Run> build_runs(const SensorSeries& series,
                            const PipelineConfig& config, Diagnostics& diag) {
  const std::vector<BackwashEvent> events =
      detect_backwash_events(series, config.backwash_threshold_gpm);
  const std::vector<CycleSlice> slices =
      segment_cycles(series, events, config.min_cycle_samples, diag);

  std::vector<CycleFeatures> features;
  features.reserve(slices.size());
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const std::span<const SensorRecord> slice(
        series.records.data() + slices[i].begin,
        slices[i].end - slices[i].begin);
    features.push_back(aggregate_cycle(slice, i, config.eps, &diag));
  }
  return group_runs(features, config);
}

}  // namespace ufprog
