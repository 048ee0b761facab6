#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ufprog/types.hpp"

namespace ufprog {

// Knobs for the synthetic plant-log generator. The generator targets the
// qualitative fouling phenomenology (progressive TMP rise, flux decline,
// diminishing cleaning effectiveness), not CFD-grade physics; its job is to
// exercise and benchmark the pipeline end to end.
struct ScenarioConfig {
  std::size_t n_runs = 50;
  std::size_t cycles_min = 30;
  std::size_t cycles_max = 90;
  std::size_t samples_min = 8;
  std::size_t samples_max = 16;
  double tmp_baseline = 30.0;        // psi at a clean membrane
  double tmp_fouling_rate = 0.5;     // psi of TMP rise per cycle
  double irreversible_fraction = 0.3;
  double flux_baseline = 40.0;       // GPM at a clean membrane
  double flux_decline_rate = 0.6;    // GPM lost per cycle
  double backwash_spike_flow = 25.0; // GPM, must exceed the detection threshold
  std::size_t cleaning_every = 0;    // cycles between chemical cleanings, 0 = never
  double cleaning_efficacy_decay = 0.1;
  double noise_std = 0.0025;         // relative measurement noise
  std::uint64_t seed = 77003;

  void validate() const;
  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
};

ScenarioConfig load_scenario_file(const std::string& path);

SensorSeries generate_scenario(const ScenarioConfig& config);

// The committed acceptance-benchmark scenario: parameters and seed are
// fixed here so every checkout regenerates the identical series.
ScenarioConfig standard_fixture_config();
SensorSeries standard_fixture();

}  // namespace ufprog
