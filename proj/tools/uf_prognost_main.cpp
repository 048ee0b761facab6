#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ufprog/artifacts.hpp"
#include "ufprog/config.hpp"
#include "ufprog/errors.hpp"
#include "ufprog/eval.hpp"
#include "ufprog/ingest.hpp"
#include "ufprog/prognosis.hpp"
#include "ufprog/segmentation.hpp"
#include "ufprog/simulate.hpp"

namespace {

using namespace ufprog;

struct CommonOptions {
  std::string config_path;
  std::optional<double> train_fraction;
  std::optional<std::size_t> window_length;
  std::optional<std::size_t> top_k;
  std::optional<double> interval_level;
  std::optional<double> backwash_threshold;
  bool allow_same_run = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path,
                  "JSON config file; omitted fields keep their defaults");
  cmd->add_option("--train-fraction", opts.train_fraction,
                  "override the chronological train fraction");
  cmd->add_option("--window-length", opts.window_length,
                  "override the signature window length");
  cmd->add_option("--top-k", opts.top_k,
                  "override the number of retrieved exemplars");
  cmd->add_option("--interval-level", opts.interval_level,
                  "override the prediction interval level");
  cmd->add_option("--backwash-threshold", opts.backwash_threshold,
                  "override the backwash detection threshold (GPM)");
  cmd->add_flag("--allow-same-run", opts.allow_same_run,
                "let retrieval use exemplars from the query's own run");
}

PipelineConfig effective_config(const CommonOptions& opts) {
  PipelineConfig cfg = opts.config_path.empty()
                           ? PipelineConfig{}
                           : load_config_file(opts.config_path);
  if (opts.train_fraction) cfg.train_fraction = *opts.train_fraction;
  if (opts.window_length) cfg.window_length = *opts.window_length;
  if (opts.top_k) cfg.top_k = *opts.top_k;
  if (opts.interval_level) cfg.interval_level = *opts.interval_level;
  if (opts.backwash_threshold) {
    cfg.backwash_threshold_gpm = *opts.backwash_threshold;
  }
  if (opts.allow_same_run) cfg.exclude_same_run = false;
  cfg.validate();
  return cfg;
}

void print_warnings(const Diagnostics& diag) {
  for (const std::string& w : diag.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

void require_digest(const std::string& artifact_digest,
                    const std::string& config_digest, const char* what) {
  if (artifact_digest != config_digest) {
    throw ConfigError(std::string(what) + " was produced under config digest " +
                      artifact_digest + " but the current config digest is " +
                      config_digest + "; refusing to mix pipeline stages");
  }
}

int cmd_ingest(const std::string& input, const std::string& out,
               const CommonOptions& opts) {
  const PipelineConfig cfg = effective_config(opts);
  Diagnostics diag;
  SensorSeries series = load_sensor_csv(input, cfg, diag);
  series = validate_series(std::move(series), diag);
  CyclesArtifact artifact;
  artifact.runs = build_runs(series, cfg, diag);
  artifact.source_id = series.source_id;
  artifact.config_digest = cfg.digest();
  artifact.diagnostics = diag;
  write_cycles_artifact(out, artifact);
  print_warnings(diag);
  std::size_t n_cycles = 0;
  std::size_t n_failed = 0;
  for (const Run& run : artifact.runs) {
    n_cycles += run.cycles.size();
    if (run.reached_failure) ++n_failed;
  }
  std::cout << "ingested " << series.records.size() << " records into "
            << artifact.runs.size() << " runs (" << n_failed
            << " reached failure), " << n_cycles << " cycles -> " << out
            << "\n";
  return kExitOk;
}

int cmd_build(const std::string& cycles_path, const std::string& out,
              bool train_only, const std::string& export_text,
              const CommonOptions& opts) {
  const PipelineConfig cfg = effective_config(opts);
  const CyclesArtifact artifact = read_cycles_artifact(cycles_path);
  require_digest(artifact.config_digest, cfg.digest(), "cycles artifact");
  std::vector<Run> runs = artifact.runs;
  if (train_only) {
    runs = chronological_split(std::move(runs), cfg.train_fraction).first;
  }
  ExemplarLibrary library = build_library(runs, cfg);
  library.build_timestamp = utc_timestamp_now();
  write_library_artifact(out, library);
  if (!export_text.empty()) {
    write_text_file(export_text, render_library_text(library));
  }
  std::cout << "built library with " << library.exemplars.size()
            << " exemplars from " << library.source_run_ids.size()
            << " failed runs -> " << out << "\n";
  return kExitOk;
}

int cmd_predict(const std::string& library_path, const std::string& cycles_path,
                std::optional<std::size_t> run_id,
                std::optional<std::size_t> cycle_index, bool all_test,
                bool explain_flag, const std::string& out,
                const CommonOptions& opts) {
  const PipelineConfig cfg = effective_config(opts);
  const ExemplarLibrary library = read_library_artifact(library_path);
  const CyclesArtifact artifact = read_cycles_artifact(cycles_path);
  require_digest(library.config_digest, cfg.digest(), "library");
  require_digest(artifact.config_digest, cfg.digest(), "cycles artifact");

  struct Target {
    const Run* run;
    std::size_t t;
  };
  std::vector<Target> targets;
  std::vector<Run> test_runs;
  std::size_t skipped = 0;
  if (all_test) {
    test_runs = chronological_split(artifact.runs, cfg.train_fraction).second;
    for (const Run& run : test_runs) {
      if (!run.reached_failure) continue;
      skipped += std::min(run.cycles.size(), cfg.window_length - 1);
      for (std::size_t t = cfg.window_length - 1; t < run.cycles.size(); ++t) {
        targets.push_back({&run, t});
      }
    }
  } else {
    const Run* selected = nullptr;
    for (const Run& run : artifact.runs) {
      if (run.run_id == *run_id) {
        selected = &run;
        break;
      }
    }
    if (selected == nullptr) {
      throw DataError("no run with id " + std::to_string(*run_id) +
                      " in cycles artifact");
    }
    std::optional<std::size_t> position;
    for (std::size_t t = 0; t < selected->cycles.size(); ++t) {
      if (selected->cycles[t].cycle_index == *cycle_index) {
        position = t;
        break;
      }
    }
    if (!position) {
      throw DataError("run " + std::to_string(*run_id) + " has no cycle " +
                      std::to_string(*cycle_index));
    }
    if (*position + 1 < cfg.window_length) {
      std::cerr << "skipped: cycle " << *cycle_index << " of run " << *run_id
                << " has only " << *position + 1 << " cycles of history ("
                << cfg.window_length << " needed)\n";
      return kExitOk;
    }
    targets.push_back({selected, *position});
  }

  Diagnostics diag;
  diag.skipped_queries = skipped;
  nlohmann::json docs = nlohmann::json::array();
  for (const Target& target : targets) {
    const std::optional<std::size_t> exclude =
        cfg.exclude_same_run ? std::optional<std::size_t>(target.run->run_id)
                             : std::nullopt;
    const Prediction pred =
        predict(*target.run, target.t, library, cfg, exclude, &diag);
    docs.push_back(prediction_to_json(pred));
    if (explain_flag) {
      std::cout << explain(pred) << "\n";
    }
  }
  print_warnings(diag);
  if (skipped > 0) {
    std::cerr << "skipped " << skipped << " queries with short history\n";
  }
  const std::string payload = docs.dump(2) + "\n";
  if (!out.empty()) {
    write_text_file(out, payload);
    std::cout << docs.size() << " predictions -> " << out << "\n";
  } else if (!explain_flag) {
    std::cout << payload;
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& input, const std::string& fixture,
                 const std::string& out_dir, const CommonOptions& opts) {
  const PipelineConfig cfg = effective_config(opts);
  Diagnostics diag;
  SensorSeries series;
  bool with_reference = false;
  if (!input.empty()) {
    series = load_sensor_csv(input, cfg, diag);
    with_reference = true;
  } else {
    if (fixture != "standard") {
      throw ConfigError("unknown fixture '" + fixture +
                        "' (only 'standard' is defined)");
    }
    series = standard_fixture();
  }
  series = validate_series(std::move(series), diag);
  const EvalReport report = run_evaluation(series, cfg, diag);

  std::filesystem::create_directories(out_dir);
  nlohmann::json report_json = report_to_json(report);
  report_json["config"] = cfg.to_json();
  const std::string table = render_report_table(report, with_reference);
  write_text_file(out_dir + "/report.json", report_json.dump(2) + "\n");
  write_text_file(out_dir + "/report.txt", table);
  write_text_file(out_dir + "/predictions.csv",
                  render_predictions_csv(report.records));
  print_warnings(diag);
  std::cout << table;
  std::cout << "report written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& scenario, const std::string& out,
                 std::optional<std::uint64_t> seed_override) {
  ScenarioConfig scfg = scenario == "standard" ? standard_fixture_config()
                                               : load_scenario_file(scenario);
  if (seed_override) scfg.seed = *seed_override;
  const SensorSeries series = generate_scenario(scfg);
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    throw DataError("cannot open output file: " + out);
  }
  const ColumnMapping columns;
  write_sensor_csv(file, series, columns, ',');
  std::cout << "simulated " << series.records.size() << " records -> " << out
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "uf-prognost: health-index trajectories and remaining-useful-life "
      "prediction for ultrafiltration membranes"};
  app.require_subcommand(1);

  CommonOptions ingest_opts, build_opts, predict_opts, evaluate_opts;

  auto* ingest = app.add_subcommand(
      "ingest", "parse a sensor CSV into a runs-and-cycles artifact");
  std::string ingest_input, ingest_out;
  ingest->add_option("--input", ingest_input, "sensor CSV file")->required();
  ingest->add_option("--out", ingest_out, "output artifact path")->required();
  add_common_options(ingest, ingest_opts);

  auto* build = app.add_subcommand(
      "build", "build an exemplar library from failed runs");
  std::string build_cycles, build_out, build_export_text;
  bool build_train_only = false;
  build->add_option("--cycles", build_cycles, "cycles artifact")->required();
  build->add_option("--out", build_out, "output library path")->required();
  build->add_flag("--train-only", build_train_only,
                  "use only the chronological train split");
  build->add_option("--export-text", build_export_text,
                    "also write a plain-text exemplar listing here");
  add_common_options(build, build_opts);

  auto* predict_cmd = app.add_subcommand(
      "predict", "predict RUL for selected cycles");
  std::string predict_library, predict_cycles, predict_out;
  std::optional<std::size_t> predict_run, predict_cycle;
  bool predict_all_test = false, predict_explain = false;
  predict_cmd->add_option("--library", predict_library, "library artifact")
      ->required();
  predict_cmd->add_option("--cycles", predict_cycles, "cycles artifact")
      ->required();
  auto* run_opt = predict_cmd->add_option("--run", predict_run,
                                          "run id of the query cycle");
  auto* cycle_opt = predict_cmd->add_option("--cycle", predict_cycle,
                                            "series cycle index of the query");
  auto* all_test_opt = predict_cmd->add_flag(
      "--all-test", predict_all_test,
      "predict every eligible labeled cycle of the test split");
  run_opt->needs(cycle_opt);
  cycle_opt->needs(run_opt);
  all_test_opt->excludes(run_opt);
  predict_cmd->add_flag("--explain", predict_explain,
                        "print rendered rules for each prediction");
  predict_cmd->add_option("--out", predict_out,
                          "write prediction documents to this file");
  add_common_options(predict_cmd, predict_opts);

  auto* evaluate = app.add_subcommand(
      "evaluate", "run the full train/test benchmark and write a report");
  std::string evaluate_input, evaluate_fixture = "standard", evaluate_out;
  auto* eval_input_opt =
      evaluate->add_option("--input", evaluate_input, "sensor CSV file");
  evaluate->add_option("--fixture", evaluate_fixture,
                       "named synthetic fixture (default: standard)")
      ->excludes(eval_input_opt);
  evaluate->add_option("--out", evaluate_out, "output directory")->required();
  add_common_options(evaluate, evaluate_opts);

  auto* simulate = app.add_subcommand(
      "simulate", "generate a synthetic sensor CSV");
  std::string simulate_scenario = "standard", simulate_out;
  std::optional<std::uint64_t> simulate_seed;
  simulate->add_option("--scenario", simulate_scenario,
                       "scenario JSON file or 'standard'");
  simulate->add_option("--out", simulate_out, "output CSV path")->required();
  simulate->add_option("--seed", simulate_seed, "override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ufprog::kExitOk : ufprog::kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(ingest_input, ingest_out, ingest_opts);
    }
    if (build->parsed()) {
      return cmd_build(build_cycles, build_out, build_train_only,
                       build_export_text, build_opts);
    }
    if (predict_cmd->parsed()) {
      if (!predict_all_test && !predict_run) {
        throw ufprog::ConfigError(
            "predict needs either --all-test or --run R --cycle C");
      }
      return cmd_predict(predict_library, predict_cycles, predict_run,
                         predict_cycle, predict_all_test, predict_explain,
                         predict_out, predict_opts);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(evaluate_input, evaluate_fixture, evaluate_out,
                          evaluate_opts);
    }
    if (simulate->parsed()) {
      return cmd_simulate(simulate_scenario, simulate_out, simulate_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ufprog::exit_code_for(e);
  }
  return ufprog::kExitOk;
}
