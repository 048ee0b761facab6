#include "ufprog/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ufprog/errors.hpp"
#include "ufprog/rng.hpp"

namespace ufprog {

void ScenarioConfig::validate() const {
  if (n_runs == 0) throw ConfigError("n_runs must be at least 1");
  if (cycles_min == 0 || cycles_min > cycles_max) {
    throw ConfigError("cycles range must satisfy 1 <= min <= max");
  }
  if (samples_min < 2 || samples_min > samples_max) {
    throw ConfigError("samples range must satisfy 2 <= min <= max");
  }
  if (tmp_baseline <= 0.0 || tmp_fouling_rate <= 0.0) {
    throw ConfigError("tmp_baseline and tmp_fouling_rate must be positive");
  }
  if (irreversible_fraction < 0.0 || irreversible_fraction > 1.0) {
    throw ConfigError("irreversible_fraction must lie in [0, 1]");
  }
  if (flux_baseline <= 0.0 || flux_decline_rate <= 0.0) {
    throw ConfigError("flux_baseline and flux_decline_rate must be positive");
  }
  if (backwash_spike_flow <= 15.0) {
    throw ConfigError(
        "backwash_spike_flow must exceed the 15 GPM detection threshold");
  }
  if (cleaning_efficacy_decay < 0.0 || cleaning_efficacy_decay > 1.0) {
    throw ConfigError("cleaning_efficacy_decay must lie in [0, 1]");
  }
  if (noise_std < 0.0) throw ConfigError("noise_std must be non-negative");
}

nlohmann::json ScenarioConfig::to_json() const {
  return nlohmann::json{{"n_runs", n_runs},
                        {"cycles_min", cycles_min},
                        {"cycles_max", cycles_max},
                        {"samples_min", samples_min},
                        {"samples_max", samples_max},
                        {"tmp_baseline", tmp_baseline},
                        {"tmp_fouling_rate", tmp_fouling_rate},
                        {"irreversible_fraction", irreversible_fraction},
                        {"flux_baseline", flux_baseline},
                        {"flux_decline_rate", flux_decline_rate},
                        {"backwash_spike_flow", backwash_spike_flow},
                        {"cleaning_every", cleaning_every},
                        {"cleaning_efficacy_decay", cleaning_efficacy_decay},
                        {"noise_std", noise_std},
                        {"seed", seed}};
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("scenario root must be a JSON object");
  }
  ScenarioConfig cfg;
  const auto read = [&j](const char* key, auto& out) {
    if (auto it = j.find(key); it != j.end()) {
      try {
        out = it->get<std::remove_reference_t<decltype(out)>>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("scenario field '") + key +
                          "' has the wrong type");
      }
    }
  };
  read("n_runs", cfg.n_runs);
  read("cycles_min", cfg.cycles_min);
  read("cycles_max", cfg.cycles_max);
  read("samples_min", cfg.samples_min);
  read("samples_max", cfg.samples_max);
  read("tmp_baseline", cfg.tmp_baseline);
  read("tmp_fouling_rate", cfg.tmp_fouling_rate);
  read("irreversible_fraction", cfg.irreversible_fraction);
  read("flux_baseline", cfg.flux_baseline);
  read("flux_decline_rate", cfg.flux_decline_rate);
  read("backwash_spike_flow", cfg.backwash_spike_flow);
  read("cleaning_every", cfg.cleaning_every);
  read("cleaning_efficacy_decay", cfg.cleaning_efficacy_decay);
  read("noise_std", cfg.noise_std);
  read("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario file " + path + " is not valid JSON: " +
                      e.what());
  }
  return ScenarioConfig::from_json(j);
}

namespace {

constexpr double kSampleInterval = 30.0;      // seconds between records
constexpr double kInterRunGap = 108000.0;     // 30 h shutdown between runs
constexpr double kEpochStart = 1.7e9;
constexpr double kFiltratePressure = 10.0;    // psi, nominal clean side
constexpr double kReferenceTemperature = 20.0;
constexpr double kIdleBackwashFlow = 0.2;     // GPM during filtration
constexpr std::size_t kBackwashSamples = 3;

// Degradation severity in [0, 1]: slow early drift, fast late collapse.
double severity_curve(double q) {
  return 0.35 * q + 0.65 * q * q * q * q;
}

struct NoiseModel {
  Rng* rng;
  double pressure_sigma;
  double relative_sigma;
  double temperature_sigma;

  double pressure() { return rng->gaussian() * pressure_sigma; }
  double relative() { return 1.0 + rng->gaussian() * relative_sigma; }
  double temperature() {
    return kReferenceTemperature + rng->gaussian() * temperature_sigma;
  }
};

}  // namespace

SensorSeries generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  NoiseModel noise{&rng, config.noise_std * config.tmp_baseline,
                   config.noise_std, config.noise_std * 4.0};

  SensorSeries series;
  series.source_id = "simulated";
  double now = kEpochStart;

  const double swing_amp = 0.2 * config.tmp_baseline;
  const double swing_floor = 0.05;

  const auto emit_record = [&](double tmp_true, double flux_true,
                               double backwash_true) {
    SensorRecord rec;
    rec.timestamp = now;
    now += kSampleInterval;
    rec.filtrate_pressure = kFiltratePressure + noise.pressure();
    rec.feed_pressure = kFiltratePressure + tmp_true + noise.pressure();
    rec.filtrate_flow = flux_true * noise.relative();
    rec.temperature = noise.temperature();
    rec.backwash_flow = backwash_true * noise.relative();
    series.records.push_back(rec);
  };

  for (std::size_t r = 0; r < config.n_runs; ++r) {
    if (r > 0) now += kInterRunGap;
    const std::size_t n_cycles = static_cast<std::size_t>(rng.uniform_int(
        static_cast<int>(config.cycles_min), static_cast<int>(config.cycles_max)));

    double residual = 0.0;  // irreversible fouling left behind by cleanings
    std::size_t cleanings_done = 0;
    std::size_t remaining = n_cycles;
    while (remaining > 0) {
      const std::size_t seg_len =
          config.cleaning_every == 0
              ? remaining
              : std::min<std::size_t>(config.cleaning_every, remaining);
      const double tmp_amp =
          config.tmp_fouling_rate * static_cast<double>(seg_len - 1);
      const double flux_amp =
          std::min(config.flux_decline_rate * static_cast<double>(seg_len - 1),
                   0.95 * config.flux_baseline);

      for (std::size_t t = 0; t < seg_len; ++t) {
        const double q =
            seg_len > 1 ? static_cast<double>(t) /
                              static_cast<double>(seg_len - 1)
                        : 1.0;
        const double severity =
            residual + (1.0 - residual) * severity_curve(q);
        const double end_spike = (t + 1 == seg_len) ? 0.10 * tmp_amp : 0.0;
        const double tmp_level =
            config.tmp_baseline + tmp_amp * severity + end_spike;
        const double swing =
            std::max(swing_floor, swing_amp * (1.0 - q / 0.75));
        const double tmp_low = tmp_level - 0.5 * swing;
        const double flux = config.flux_baseline - flux_amp * severity;

        const std::size_t n_filtration = static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(config.samples_min),
                            static_cast<int>(config.samples_max)));
        for (std::size_t s = 0; s < n_filtration; ++s) {
          const double frac = static_cast<double>(s) /
                              static_cast<double>(n_filtration - 1);
          emit_record(tmp_low + swing * frac, flux, kIdleBackwashFlow);
        }
        for (std::size_t s = 0; s < kBackwashSamples; ++s) {
          emit_record(tmp_low + 0.5 * swing, flux, config.backwash_spike_flow);
        }
      }

      remaining -= seg_len;
      if (remaining > 0) {
        const double efficacy =
            (1.0 - config.irreversible_fraction) *
            std::pow(1.0 - config.cleaning_efficacy_decay,
                     static_cast<double>(cleanings_done));
        residual = 1.0 - efficacy;
        cleanings_done += 1;
      }
    }
  }
  return series;
}

ScenarioConfig standard_fixture_config() {
  return ScenarioConfig{};
}

SensorSeries standard_fixture() {
  return generate_scenario(standard_fixture_config());
}

}  // namespace ufprog
