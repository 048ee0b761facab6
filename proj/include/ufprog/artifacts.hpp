#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ufprog/eval.hpp"
#include "ufprog/prognosis.hpp"
#include "ufprog/segmentation.hpp"
#include "ufprog/types.hpp"

namespace ufprog {

// On-disk product of the ingest stage: segmented, normalized, labeled runs
// plus the diagnostics that accumulated while producing them.
struct CyclesArtifact {
  std::vector<Run> runs;
  std::string source_id;
  std::string config_digest;
  Diagnostics diagnostics;
};

nlohmann::json diagnostics_to_json(const Diagnostics& diag);

nlohmann::json cycles_to_json(const CyclesArtifact& artifact);
CyclesArtifact cycles_from_json(const nlohmann::json& j);
void write_cycles_artifact(const std::string& path,
                           const CyclesArtifact& artifact);
CyclesArtifact read_cycles_artifact(const std::string& path);

nlohmann::json library_to_json(const ExemplarLibrary& library);
ExemplarLibrary library_from_json(const nlohmann::json& j);
void write_library_artifact(const std::string& path,
                            const ExemplarLibrary& library);
ExemplarLibrary read_library_artifact(const std::string& path);

// One exemplar per line: index, source run, cycle, RUL, 120 degrees.
std::string render_library_text(const ExemplarLibrary& library);

nlohmann::json prediction_to_json(const Prediction& prediction);
nlohmann::json report_to_json(const EvalReport& report);

void write_text_file(const std::string& path, const std::string& content);
nlohmann::json read_json_file(const std::string& path);

std::string utc_timestamp_now();

}  // namespace ufprog
