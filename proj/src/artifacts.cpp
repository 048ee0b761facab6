#include "ufprog/artifacts.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ufprog/errors.hpp"

namespace ufprog {

namespace {

constexpr const char* kCyclesFormat = "uf-prognost-cycles";
constexpr const char* kLibraryFormat = "uf-prognost-library";
constexpr int kArtifactVersion = 1;

void check_format(const nlohmann::json& j, const char* expected) {
  if (!j.is_object() || j.value("format", std::string{}) != expected) {
    throw DataError(std::string("artifact is not a ") + expected +
                    " document");
  }
  if (j.value("version", 0) != kArtifactVersion) {
    throw DataError(std::string("unsupported ") + expected + " version");
  }
}

nlohmann::json partition_to_json(const FuzzyPartition& p) {
  return {{"centers", p.centers}, {"sigma", p.sigma}};
}

FuzzyPartition partition_from_json(const nlohmann::json& j) {
  FuzzyPartition p;
  const auto centers = j.at("centers").get<std::vector<double>>();
  if (centers.size() != 3) {
    throw DataError("partition must have exactly 3 centers");
  }
  p.centers = {centers[0], centers[1], centers[2]};
  p.sigma = j.at("sigma").get<double>();
  return p;
}

nlohmann::json run_to_json(const Run& run) {
  nlohmann::json features = nlohmann::json::array();
  for (const CycleFeatures& f : run.features) {
    features.push_back({{"cycle_index", f.cycle_index},
                        {"start_time", f.start_time},
                        {"end_time", f.end_time},
                        {"tmp", f.tmp},
                        {"flux", f.flux},
                        {"resistance", f.resistance},
                        {"recovery", f.recovery},
                        {"temperature", f.temperature},
                        {"n_samples", f.n_samples}});
  }
  nlohmann::json cycles = nlohmann::json::array();
  for (const NormalizedCycle& c : run.cycles) {
    cycles.push_back({{"cycle_index", c.cycle_index},
                      {"r_star", c.r_star},
                      {"tmp_star", c.tmp_star},
                      {"j_star", c.j_star},
                      {"rec_star", c.rec_star},
                      {"hi", c.hi},
                      {"dhi", c.dhi}});
  }
  nlohmann::json j = {{"run_id", run.run_id},
                      {"start_reason", to_string(run.start_reason)},
                      {"end_reason", to_string(run.end_reason)},
                      {"reached_failure", run.reached_failure},
                      {"features", std::move(features)},
                      {"cycles", std::move(cycles)}};
  if (run.reached_failure) {
    j["rul_labels"] = run.rul_labels;
  }
  return j;
}

Run run_from_json(const nlohmann::json& j) {
  Run run;
  run.run_id = j.at("run_id").get<std::size_t>();
  run.start_reason =
      start_reason_from_string(j.at("start_reason").get<std::string>());
  run.end_reason =
      end_reason_from_string(j.at("end_reason").get<std::string>());
  run.reached_failure = j.at("reached_failure").get<bool>();
  for (const nlohmann::json& f : j.at("features")) {
    CycleFeatures feat;
    feat.cycle_index = f.at("cycle_index").get<std::size_t>();
    feat.start_time = f.at("start_time").get<double>();
    feat.end_time = f.at("end_time").get<double>();
    feat.tmp = f.at("tmp").get<double>();
    feat.flux = f.at("flux").get<double>();
    feat.resistance = f.at("resistance").get<double>();
    feat.recovery = f.at("recovery").get<double>();
    feat.temperature = f.at("temperature").get<double>();
    feat.n_samples = f.at("n_samples").get<std::size_t>();
    run.features.push_back(feat);
  }
  for (const nlohmann::json& c : j.at("cycles")) {
    NormalizedCycle cyc;
    cyc.cycle_index = c.at("cycle_index").get<std::size_t>();
    cyc.r_star = c.at("r_star").get<double>();
    cyc.tmp_star = c.at("tmp_star").get<double>();
    cyc.j_star = c.at("j_star").get<double>();
    cyc.rec_star = c.at("rec_star").get<double>();
    cyc.hi = c.at("hi").get<double>();
    cyc.dhi = c.at("dhi").get<double>();
    run.cycles.push_back(cyc);
  }
  if (run.reached_failure) {
    run.rul_labels = j.at("rul_labels").get<std::vector<int>>();
    if (run.rul_labels.size() != run.cycles.size()) {
      throw DataError("run " + std::to_string(run.run_id) +
                      ": label count does not match cycle count");
    }
  }
  if (run.features.size() != run.cycles.size()) {
    throw DataError("run " + std::to_string(run.run_id) +
                    ": feature count does not match cycle count");
  }
  return run;
}

}  // namespace

nlohmann::json diagnostics_to_json(const Diagnostics& diag) {
  return {{"dropped_rows", diag.dropped_rows},
          {"duplicate_timestamps", diag.duplicate_timestamps},
          {"negative_value_records", diag.negative_value_records},
          {"negative_tmp_records", diag.negative_tmp_records},
          {"skipped_queries", diag.skipped_queries},
          {"zero_similarity_fallbacks", diag.zero_similarity_fallbacks},
          {"warnings", diag.warnings}};
}

nlohmann::json cycles_to_json(const CyclesArtifact& artifact) {
  nlohmann::json runs = nlohmann::json::array();
  for (const Run& run : artifact.runs) {
    runs.push_back(run_to_json(run));
  }
  return {{"format", kCyclesFormat},
          {"version", kArtifactVersion},
          {"config_digest", artifact.config_digest},
          {"source_id", artifact.source_id},
          {"diagnostics", diagnostics_to_json(artifact.diagnostics)},
          {"runs", std::move(runs)}};
}

CyclesArtifact cycles_from_json(const nlohmann::json& j) {
  check_format(j, kCyclesFormat);
  CyclesArtifact artifact;
  artifact.config_digest = j.at("config_digest").get<std::string>();
  artifact.source_id = j.at("source_id").get<std::string>();
  for (const nlohmann::json& r : j.at("runs")) {
    artifact.runs.push_back(run_from_json(r));
  }
  return artifact;
}

void write_cycles_artifact(const std::string& path,
                           const CyclesArtifact& artifact) {
  write_text_file(path, cycles_to_json(artifact).dump(2) + "\n");
}

CyclesArtifact read_cycles_artifact(const std::string& path) {
  return cycles_from_json(read_json_file(path));
}

nlohmann::json library_to_json(const ExemplarLibrary& library) {
  nlohmann::json rul = nlohmann::json::array();
  nlohmann::json run_id = nlohmann::json::array();
  nlohmann::json cycle_index = nlohmann::json::array();
  nlohmann::json values = nlohmann::json::array();
  for (const FuzzySignature& ex : library.exemplars) {
    rul.push_back(ex.rul.value_or(0));
    run_id.push_back(ex.run_id);
    cycle_index.push_back(ex.cycle_index);
    values.push_back(ex.values);
  }
  return {{"format", kLibraryFormat},
          {"version", kArtifactVersion},
          {"config_digest", library.config_digest},
          {"window_length", library.window_length},
          {"partitions",
           {{"hi", partition_to_json(library.hi_partition)},
            {"dhi", partition_to_json(library.dhi_partition)}}},
          {"exemplars",
           {{"rul", std::move(rul)},
            {"run_id", std::move(run_id)},
            {"cycle_index", std::move(cycle_index)},
            {"values", std::move(values)}}},
          {"metadata",
           {{"n_exemplars", library.exemplars.size()},
            {"source_run_ids", library.source_run_ids},
            {"build_timestamp", library.build_timestamp}}}};
}

ExemplarLibrary library_from_json(const nlohmann::json& j) {
  check_format(j, kLibraryFormat);
  ExemplarLibrary library;
  library.config_digest = j.at("config_digest").get<std::string>();
  library.window_length = j.at("window_length").get<std::size_t>();
  library.hi_partition = partition_from_json(j.at("partitions").at("hi"));
  library.dhi_partition = partition_from_json(j.at("partitions").at("dhi"));
  const nlohmann::json& ex = j.at("exemplars");
  const auto ruls = ex.at("rul").get<std::vector<int>>();
  const auto run_ids = ex.at("run_id").get<std::vector<std::size_t>>();
  const auto cycle_indices =
      ex.at("cycle_index").get<std::vector<std::size_t>>();
  const nlohmann::json& values = ex.at("values");
  if (ruls.size() != run_ids.size() || ruls.size() != cycle_indices.size() ||
      ruls.size() != values.size()) {
    throw DataError("library exemplar arrays have mismatched lengths");
  }
  const std::size_t expected = library.window_length * kValuesPerCycle;
  for (std::size_t i = 0; i < ruls.size(); ++i) {
    FuzzySignature sig;
    sig.values = values[i].get<std::vector<double>>();
    if (sig.values.size() != expected) {
      throw DataError("exemplar " + std::to_string(i) + " has " +
                      std::to_string(sig.values.size()) +
                      " values, expected " + std::to_string(expected));
    }
    if (ruls[i] < 0) {
      throw DataError("exemplar " + std::to_string(i) + " has negative RUL");
    }
    sig.rul = ruls[i];
    sig.run_id = run_ids[i];
    sig.cycle_index = cycle_indices[i];
    library.exemplars.push_back(std::move(sig));
  }
  const nlohmann::json& meta = j.at("metadata");
  library.source_run_ids =
      meta.at("source_run_ids").get<std::vector<std::size_t>>();
  library.build_timestamp = meta.at("build_timestamp").get<std::string>();
  if (library.exemplars.empty()) {
    throw DataError("library artifact holds no exemplars");
  }
  return library;
}

void write_library_artifact(const std::string& path,
                            const ExemplarLibrary& library) {
  write_text_file(path, library_to_json(library).dump(2) + "\n");
}

ExemplarLibrary read_library_artifact(const std::string& path) {
  return library_from_json(read_json_file(path));
}

std::string render_library_text(const ExemplarLibrary& library) {
  std::ostringstream out;
  out << "# exemplar run cycle rul degrees[" << library.window_length * 6
      << "]\n";
  char buf[32];
  for (std::size_t i = 0; i < library.exemplars.size(); ++i) {
    const FuzzySignature& ex = library.exemplars[i];
    out << i << " " << ex.run_id << " " << ex.cycle_index << " "
        << ex.rul.value_or(0);
    for (double v : ex.values) {
      std::snprintf(buf, sizeof(buf), " %.6f", v);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::json prediction_to_json(const Prediction& prediction) {
  nlohmann::json matches = nlohmann::json::array();
  for (const Match& m : prediction.matches) {
    matches.push_back({{"exemplar", m.exemplar_ref},
                       {"similarity", m.similarity},
                       {"rul", m.rul}});
  }
  nlohmann::json rules = nlohmann::json::array();
  for (const MinedRule& rule : prediction.rules) {
    nlohmann::json antecedents = nlohmann::json::array();
    for (const RuleTerm& term : rule.antecedents) {
      antecedents.push_back(
          {{"cycle_offset", term.cycle_offset},
           {"feature", term.feature == 0 ? "HI" : "dHI"},
           {"label", kLinguisticLabels[static_cast<std::size_t>(term.label)]},
           {"degree", term.degree}});
    }
    rules.push_back({{"exemplar", rule.exemplar_ref},
                     {"similarity", rule.firing_strength},
                     {"rul", rule.consequent_rul},
                     {"antecedents", std::move(antecedents)}});
  }
  return {{"run_id", prediction.run_id},
          {"cycle_index", prediction.cycle_index},
          {"rul_estimate", prediction.rul_estimate},
          {"interval",
           {{"lo", prediction.interval_lo},
            {"hi", prediction.interval_hi},
            {"level", prediction.interval_level}}},
          {"window_length", prediction.window_length},
          {"matches", std::move(matches)},
          {"rules", std::move(rules)}};
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json strata = nlohmann::json::array();
  for (const StratumRow& row : report.strata) {
    strata.push_back({{"label", row.label},
                      {"n", row.n},
                      {"mae", row.metrics.mae},
                      {"rmse", row.metrics.rmse},
                      {"coverage", row.metrics.coverage}});
  }
  return {{"format", "uf-prognost-report"},
          {"version", kArtifactVersion},
          {"config_digest", report.config_digest},
          {"runs",
           {{"total", report.n_runs_total},
            {"train", report.n_train_runs},
            {"test", report.n_test_runs}}},
          {"exemplars", report.n_exemplars},
          {"test_cycles",
           {{"total", report.n_test_cycles_total},
            {"scored", report.n_scored},
            {"short_history", report.n_short_history},
            {"unlabeled", report.n_unlabeled}}},
          {"overall",
           {{"n", report.n_scored},
            {"mae", report.overall.mae},
            {"rmse", report.overall.rmse},
            {"coverage", report.overall.coverage}}},
          {"baseline_mae", report.baseline_mae},
          {"strata", std::move(strata)}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open output file: " + path);
  }
  out << content;
  if (!out) {
    throw DataError("failed writing output file: " + path);
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("file " + path + " is not valid JSON: " + e.what());
  }
  return j;
}

std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

}  // namespace ufprog
