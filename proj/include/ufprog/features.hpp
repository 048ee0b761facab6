#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ufprog/types.hpp"

namespace ufprog {

inline constexpr double kDefaultEps = 1e-9;

// Weights of the composite Health Index. Defaults prioritize resistance
// and flux as the primary fouling indicators.
struct HealthWeights {
  double resistance = 0.30;
  double tmp = 0.25;
  double flux = 0.30;
  double recovery = 0.15;

  // Throws ConfigError unless all weights are non-negative and they sum
  // to 1 within 1e-12.
  void validate() const;
};

// Aggregated hydraulics of one filtration-backwash cycle.
struct CycleFeatures {
  std::size_t cycle_index = 0;  // ordinal within the source series
  double start_time = 0.0;
  double end_time = 0.0;
  double tmp = 0.0;          // cycle-mean transmembrane pressure, psi
  double flux = 0.0;         // cycle-mean filtrate flow, GPM
  double resistance = 0.0;   // relative resistance from the cycle means
  double recovery = 0.0;     // within-cycle TMP max - min, psi
  double temperature = 0.0;  // cycle-mean, degrees C
  std::size_t n_samples = 0;
};

// Per-run min-max normalized view of a cycle plus the Health Index and its
// first difference.
struct NormalizedCycle {
  std::size_t cycle_index = 0;
  double r_star = 0.0;
  double tmp_star = 0.0;
  double j_star = 0.0;
  double rec_star = 0.0;
  double hi = 0.0;
  double dhi = 0.0;  // hi(t) - hi(t-1); 0 for the first cycle of a run
};

// TMP = feed - filtrate. Negative results are kept; when diag is given the
// negative-TMP counter is incremented so the condition stays visible.
double compute_tmp(double feed_pressure, double filtrate_pressure,
                   Diagnostics* diag = nullptr);

// Relative viscosity factor 1 - 0.02 (T - 20), clamped below at 0.1 so the
// resistance denominator stays positive at implausible temperatures.
double viscosity_correction(double temperature_c);

// Relative resistance TMP / (J * mu_rel + eps).
double compute_resistance(double tmp, double flux, double temperature_c,
                          double eps = kDefaultEps);

// Within-cycle TMP swing, max - min. Throws InternalError on empty input.
double compute_recovery(std::span<const double> tmp_samples);

// Collapses a time-ordered, non-empty slice of records into CycleFeatures.
// TMP, flux and temperature are arithmetic means over the slice; recovery
// uses the per-record TMP extremes; resistance is computed from the means.
CycleFeatures aggregate_cycle(std::span<const SensorRecord> records,
                              std::size_t cycle_index, double eps = kDefaultEps,
                              Diagnostics* diag = nullptr);

// Health Index for already-normalized features.
double health_index(double r_star, double tmp_star, double j_star,
                    double rec_star, const HealthWeights& weights);

// Min-max normalizes each feature over the given cycles (one run) and
// derives hi/dhi. A feature that is constant across the run maps to
// constant_fill everywhere (default 0).
std::vector<NormalizedCycle> normalize_run(std::span<const CycleFeatures> cycles,
                                           const HealthWeights& weights,
                                           double constant_fill = 0.0);

}  // namespace ufprog
