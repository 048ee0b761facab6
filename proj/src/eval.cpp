#include "ufprog/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "ufprog/errors.hpp"
#include "ufprog/prognosis.hpp"

namespace ufprog {

namespace {

// Published benchmark results from a 422-day full-scale seawater
// ultrafiltration deployment; printed for manual comparison only.
struct ReferenceRow {
  const char* label;
  std::size_t n;
  double mae;
  double rmse;
  double coverage;
};

constexpr ReferenceRow kReferenceStrata[] = {
    {"0-5", 371, 6.11, 7.54, 33.4},
    {"6-15", 611, 3.67, 4.77, 64.8},
    {"16-30", 528, 7.22, 8.71, 55.5},
    {"31+", 239, 9.28, 10.70, 48.1},
};
constexpr ReferenceRow kReferenceOverall = {"Overall", 2668, 4.08, 6.28, 68.6};

std::size_t thread_budget(std::size_t n_queries) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* cap = std::getenv("UF_PROGNOST_THREADS")) {
    const long requested = std::strtol(cap, nullptr, 10);
    if (requested >= 1) {
      n = std::min<std::size_t>(n, static_cast<std::size_t>(requested));
    }
  }
  return std::max<std::size_t>(1, std::min(n, n_queries));
}

}  // namespace

std::pair<std::vector<Run>, std::vector<Run>> chronological_split(
    std::vector<Run> runs, double fraction) {
  if (runs.size() < 2) {
    throw DataError("chronological split needs at least 2 runs, got " +
                    std::to_string(runs.size()));
  }
  const double n = static_cast<double>(runs.size());
  std::size_t n_train =
      static_cast<std::size_t>(std::floor(fraction * n + 0.5));
  n_train = std::clamp<std::size_t>(n_train, 1, runs.size() - 1);
  std::vector<Run> train(runs.begin(), runs.begin() + n_train);
  std::vector<Run> test(runs.begin() + n_train, runs.end());
  return {std::move(train), std::move(test)};
}

Metrics compute_metrics(std::span<const QueryRecord> records) {
  if (records.empty()) {
    throw DataError("compute_metrics: no records");
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t covered = 0;
  for (const QueryRecord& rec : records) {
    const double err = static_cast<double>(rec.actual) - rec.predicted;
    abs_sum += std::abs(err);
    sq_sum += err * err;
    if (rec.interval_lo <= rec.actual && rec.actual <= rec.interval_hi) {
      ++covered;
    }
  }
  const double n = static_cast<double>(records.size());
  Metrics m;
  m.mae = abs_sum / n;
  m.rmse = std::sqrt(sq_sum / n);
  m.coverage = 100.0 * static_cast<double>(covered) / n;
  return m;
}

std::vector<StratumRow> stratify(std::span<const QueryRecord> records) {
  std::vector<StratumRow> rows = {
      {"0-5", 0, 5, 0, {}},
      {"6-15", 6, 15, 0, {}},
      {"16-30", 16, 30, 0, {}},
      {"31+", 31, -1, 0, {}},
  };
  std::vector<std::vector<QueryRecord>> buckets(rows.size());
  for (const QueryRecord& rec : records) {
    for (std::size_t b = 0; b < rows.size(); ++b) {
      const bool in_bin = rec.actual >= rows[b].lo &&
                          (rows[b].hi < 0 || rec.actual <= rows[b].hi);
      if (in_bin) {
        buckets[b].push_back(rec);
        break;
      }
    }
  }
  for (std::size_t b = 0; b < rows.size(); ++b) {
    rows[b].n = buckets[b].size();
    if (!buckets[b].empty()) {
      rows[b].metrics = compute_metrics(buckets[b]);
    }
  }
  return rows;
}

EvalReport run_evaluation(const SensorSeries& series,
                          const PipelineConfig& config, Diagnostics& diag) {
  const std::vector<Run> runs = build_runs(series, config, diag);
  auto [train_runs, test_runs] =
      chronological_split(runs, config.train_fraction);

  EvalReport report;
  report.config_digest = config.digest();
  report.n_runs_total = runs.size();
  report.n_train_runs = train_runs.size();
  report.n_test_runs = test_runs.size();

  const ExemplarLibrary library = build_library(train_runs, config);
  report.n_exemplars = library.exemplars.size();

  double train_rul_sum = 0.0;
  std::size_t train_rul_count = 0;
  for (const Run& run : train_runs) {
    for (int label : run.rul_labels) {
      train_rul_sum += label;
      ++train_rul_count;
    }
  }
  const double baseline_prediction =
      train_rul_count > 0 ? train_rul_sum / static_cast<double>(train_rul_count)
                          : 0.0;

  struct Query {
    const Run* run;
    std::size_t t;
  };
  std::vector<Query> queries;
  for (const Run& run : test_runs) {
    report.n_test_cycles_total += run.cycles.size();
    if (!run.reached_failure) {
      report.n_unlabeled += run.cycles.size();
      continue;
    }
    for (std::size_t t = 0; t < run.cycles.size(); ++t) {
      if (t + 1 < config.window_length) {
        report.n_short_history += 1;
        diag.skipped_queries += 1;
      } else {
        queries.push_back({&run, t});
      }
    }
  }

  report.records.resize(queries.size());
  const std::size_t n_threads = thread_budget(queries.size());
  std::vector<Diagnostics> thread_diags(n_threads);
  const auto worker = [&](std::size_t thread_id) {
    for (std::size_t q = thread_id; q < queries.size(); q += n_threads) {
      const Run& run = *queries[q].run;
      const std::size_t t = queries[q].t;
      const std::optional<std::size_t> exclude =
          config.exclude_same_run ? std::optional<std::size_t>(run.run_id)
                                  : std::nullopt;
      const Prediction pred = predict(run, t, library, config, exclude,
                                      &thread_diags[thread_id]);
      report.records[q] = {run.run_id,          run.cycles[t].cycle_index,
                           run.rul_labels[t],   pred.rul_estimate,
                           pred.interval_lo,    pred.interval_hi};
    }
  };
  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) {
      pool.emplace_back(worker, i);
    }
    for (std::thread& th : pool) th.join();
  }
  for (const Diagnostics& d : thread_diags) diag.merge_from(d);

  report.n_scored = report.records.size();
  if (report.records.empty()) {
    throw DataError(
        "evaluation produced no scored test cycles; runs may be too short "
        "for the configured window");
  }
  report.overall = compute_metrics(report.records);
  report.strata = stratify(report.records);

  double baseline_abs_sum = 0.0;
  for (const QueryRecord& rec : report.records) {
    baseline_abs_sum += std::abs(rec.actual - baseline_prediction);
  }
  report.baseline_mae =
      baseline_abs_sum / static_cast<double>(report.records.size());
  return report;
}

namespace {

void append_table_header(std::ostringstream& out) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-12s %11s %9s %9s %13s\n", "RUL horizon",
                "Cycles (n)", "MAE", "RMSE", "Coverage (%)");
  out << buf;
}

void append_table_row(std::ostringstream& out, const char* label,
                      std::size_t n, double mae, double rmse, double coverage) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-12s %11zu %9.2f %9.2f %13.1f\n", label, n,
                mae, rmse, coverage);
  out << buf;
}

}  // namespace

std::string render_report_table(const EvalReport& report,
                                bool with_reference) {
  std::ostringstream out;
  char buf[160];
  out << "uf-prognost evaluation report\n";
  out << "=============================\n";
  out << "config digest:  " << report.config_digest << "\n";
  std::snprintf(buf, sizeof(buf), "runs:           %zu total = %zu train + %zu test\n",
                report.n_runs_total, report.n_train_runs, report.n_test_runs);
  out << buf;
  std::snprintf(buf, sizeof(buf), "exemplars:      %zu\n", report.n_exemplars);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "test cycles:    %zu total = %zu scored + %zu short-history + "
                "%zu unlabeled\n",
                report.n_test_cycles_total, report.n_scored,
                report.n_short_history, report.n_unlabeled);
  out << buf;
  out << "\n";
  append_table_header(out);
  for (const StratumRow& row : report.strata) {
    append_table_row(out, row.label.c_str(), row.n, row.metrics.mae,
                     row.metrics.rmse, row.metrics.coverage);
  }
  append_table_row(out, "Overall", report.n_scored, report.overall.mae,
                   report.overall.rmse, report.overall.coverage);
  out << "\n";
  std::snprintf(buf, sizeof(buf), "Baseline (train-mean RUL) MAE: %.2f\n",
                report.baseline_mae);
  out << buf;
  if (report.baseline_mae > 0.0) {
    std::snprintf(buf, sizeof(buf),
                  "Model improvement over baseline: %.1f%%\n",
                  100.0 * (1.0 - report.overall.mae / report.baseline_mae));
    out << buf;
  }
  if (with_reference) {
    out << "\n";
    out << "Reference benchmark values (for manual comparison):\n";
    append_table_header(out);
    for (const ReferenceRow& row : kReferenceStrata) {
      append_table_row(out, row.label, row.n, row.mae, row.rmse, row.coverage);
    }
    append_table_row(out, kReferenceOverall.label, kReferenceOverall.n,
                     kReferenceOverall.mae, kReferenceOverall.rmse,
                     kReferenceOverall.coverage);
  }
  return out.str();
}

std::string render_predictions_csv(std::span<const QueryRecord> records) {
  std::ostringstream out;
  out << "run_id,cycle_index,actual_rul,predicted_rul,interval_lo,interval_hi\n";
  char buf[128];
  for (const QueryRecord& rec : records) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%d,%.6f,%.6f,%.6f\n", rec.run_id,
                  rec.cycle_index, rec.actual, rec.predicted, rec.interval_lo,
                  rec.interval_hi);
    out << buf;
  }
  return out.str();
}

}  // namespace ufprog
