#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ufprog/config.hpp"
#include "ufprog/segmentation.hpp"
#include "ufprog/types.hpp"

namespace ufprog {

struct QueryRecord {
  std::size_t run_id = 0;
  std::size_t cycle_index = 0;
  int actual = 0;
  double predicted = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

struct Metrics {
  double mae = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;  // percent
};

struct StratumRow {
  std::string label;
  int lo = 0;
  int hi = 0;  // -1 marks an open upper bound
  std::size_t n = 0;
  Metrics metrics;
};

struct EvalReport {
  std::size_t n_runs_total = 0;
  std::size_t n_train_runs = 0;
  std::size_t n_test_runs = 0;
  std::size_t n_exemplars = 0;
  std::size_t n_test_cycles_total = 0;
  std::size_t n_scored = 0;
  std::size_t n_short_history = 0;
  std::size_t n_unlabeled = 0;
  Metrics overall;
  double baseline_mae = 0.0;
  std::vector<StratumRow> strata;
  std::vector<QueryRecord> records;
  std::string config_digest;
};

// First round(fraction * N) runs train (ties toward train), remainder test;
// the train side always keeps between 1 and N-1 runs.
std::pair<std::vector<Run>, std::vector<Run>> chronological_split(
    std::vector<Run> runs, double fraction);

Metrics compute_metrics(std::span<const QueryRecord> records);

// Integer-inclusive horizon bins 0-5, 6-15, 16-30, 31+ over actual RUL.
std::vector<StratumRow> stratify(std::span<const QueryRecord> records);

EvalReport run_evaluation(const SensorSeries& series,
                          const PipelineConfig& config, Diagnostics& diag);

// Formatted text table; with_reference appends published benchmark values
// for side-by-side manual comparison.
std::string render_report_table(const EvalReport& report, bool with_reference);

std::string render_predictions_csv(std::span<const QueryRecord> records);

}  // namespace ufprog
