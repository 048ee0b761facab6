#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ufprog/config.hpp"
#include "ufprog/features.hpp"
#include "ufprog/types.hpp"

namespace ufprog {

// One maximal contiguous region with backwash_flow at or above the detection
// threshold. Indices are half-open [begin, end) into the series records.
struct BackwashEvent {
  std::size_t begin = 0;
  std::size_t end = 0;
  double onset_time = 0.0;
  double peak_flow = 0.0;
};

// Half-open record range forming one filtration-plus-backwash cycle.
struct CycleSlice {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class RunStartReason { series_start, hi_jump, time_gap };
enum class RunEndReason { failure, next_recovery, series_end };

const char* to_string(RunStartReason reason);
const char* to_string(RunEndReason reason);
RunStartReason start_reason_from_string(const std::string& text);
RunEndReason end_reason_from_string(const std::string& text);

// One independent degradation lifecycle. features, cycles and (when labeled)
// rul_labels are parallel vectors; cycle_index values keep their series-wide
// ordinals so predictions can be traced back to the source log.
struct Run {
  std::size_t run_id = 0;
  std::vector<CycleFeatures> features;
  std::vector<NormalizedCycle> cycles;
  RunStartReason start_reason = RunStartReason::series_start;
  RunEndReason end_reason = RunEndReason::series_end;
  bool reached_failure = false;
  std::vector<int> rul_labels;
};

std::vector<BackwashEvent> detect_backwash_events(const SensorSeries& series,
                                                  double threshold_gpm);

// Cycle i runs from the end of event i-1 (exclusive) to the end of event i
// (inclusive). Records before the first event form a leading partial cycle,
// kept only when at least min_cycle_samples records precede the event onset.
// Records after the last event are dropped. Fewer than two events yields zero
// cycles and a warning.
std::vector<CycleSlice> segment_cycles(const SensorSeries& series,
                                       std::span<const BackwashEvent> events,
                                       std::size_t min_cycle_samples,
                                       Diagnostics& diag);

// Splits an ordered cycle sequence into runs. The jump test uses health
// values from a single series-wide normalization pass; each run is then
// renormalized over its own cycles, so the two normalization scopes never mix.
std::vector<Run> group_runs(std::span<const CycleFeatures> features,
                            const PipelineConfig& config);

// Marks the first cycle with hi <= failure_hi as the failure cycle, labels
// RUL counting down to zero there, and truncates anything after it.
void label_rul(Run& run, double failure_hi);

// ingest -> features -> cycles -> runs for one validated series.
std::vector<Run> build_runs(const SensorSeries& series,
                            const PipelineConfig& config, Diagnostics& diag);

}  // namespace ufprog
