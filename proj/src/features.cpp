#include "ufprog/features.hpp"

#include <algorithm>
#include <cmath>

#include "ufprog/errors.hpp"

namespace ufprog {

void HealthWeights::validate() const {
  if (resistance < 0.0 || tmp < 0.0 || flux < 0.0 || recovery < 0.0) {
    throw ConfigError("health weights must be non-negative");
  }
  const double sum = resistance + tmp + flux + recovery;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ConfigError("health weights must sum to 1");
  }
}

double compute_tmp(double feed_pressure, double filtrate_pressure,
                   Diagnostics* diag) {
  const double tmp = feed_pressure - filtrate_pressure;
  if (tmp < 0.0 && diag != nullptr) {
    diag->negative_tmp_records += 1;
  }
  return tmp;
}

double viscosity_correction(double temperature_c) {
  return std::max(1.0 - 0.02 * (temperature_c - 20.0), 0.1);
}

double compute_resistance(double tmp, double flux, double temperature_c,
                          double eps) {
  return tmp / (flux * viscosity_correction(temperature_c) + eps);
}

double compute_recovery(std::span<const double> tmp_samples) {
  if (tmp_samples.empty()) {
    throw InternalError("compute_recovery: empty sample list");
  }
  const auto [min_it, max_it] =
      std::minmax_element(tmp_samples.begin(), tmp_samples.end());
  return *max_it - *min_it;
}

CycleFeatures aggregate_cycle(std::span<const SensorRecord> records,
                              std::size_t cycle_index, double eps,
                              Diagnostics* diag) {
  if (records.empty()) {
    throw InternalError("aggregate_cycle: empty record slice");
  }
  CycleFeatures out;
  out.cycle_index = cycle_index;
  out.start_time = records.front().timestamp;
  out.end_time = records.back().timestamp;
  out.n_samples = records.size();

  double tmp_sum = 0.0;
  double flux_sum = 0.0;
  double temp_sum = 0.0;
  double tmp_min = 0.0;
  double tmp_max = 0.0;
  bool first = true;
  for (const SensorRecord& rec : records) {
    const double tmp = compute_tmp(rec.feed_pressure, rec.filtrate_pressure, diag);
    tmp_sum += tmp;
    flux_sum += rec.filtrate_flow;
    temp_sum += rec.temperature;
    if (first) {
      tmp_min = tmp_max = tmp;
      first = false;
    } else {
      tmp_min = std::min(tmp_min, tmp);
      tmp_max = std::max(tmp_max, tmp);
    }
  }
  const double n = static_cast<double>(records.size());
  out.tmp = tmp_sum / n;
  out.flux = flux_sum / n;
  out.temperature = temp_sum / n;
  out.recovery = tmp_max - tmp_min;
  out.resistance = compute_resistance(out.tmp, out.flux, out.temperature, eps);
  return out;
}

double health_index(double r_star, double tmp_star, double j_star,
                    double rec_star, const HealthWeights& weights) {
  return weights.resistance * (1.0 - r_star) + weights.tmp * (1.0 - tmp_star) +
         weights.flux * j_star + weights.recovery * rec_star;
}

namespace {

struct MinMax {
  double lo;
  double range;  // 0 marks a constant feature
};

MinMax feature_range(std::span<const CycleFeatures> cycles,
                     double CycleFeatures::* field) {
  double lo = cycles.front().*field;
  double hi = lo;
  for (const CycleFeatures& c : cycles) {
    lo = std::min(lo, c.*field);
    hi = std::max(hi, c.*field);
  }
  return {lo, hi - lo};
}

double scale(double value, const MinMax& mm, double constant_fill) {
  if (mm.range <= 0.0) return constant_fill;
  return (value - mm.lo) / mm.range;
}

}  // namespace

std::vector<NormalizedCycle> normalize_run(std::span<const CycleFeatures> cycles,
                                           const HealthWeights& weights,
                                           double constant_fill) {
  if (cycles.empty()) {
    throw InternalError("normalize_run: empty run");
  }
  const MinMax r_mm = feature_range(cycles, &CycleFeatures::resistance);
  const MinMax tmp_mm = feature_range(cycles, &CycleFeatures::tmp);
  const MinMax j_mm = feature_range(cycles, &CycleFeatures::flux);
  const MinMax rec_mm = feature_range(cycles, &CycleFeatures::recovery);

  std::vector<NormalizedCycle> out;
  out.reserve(cycles.size());
  double prev_hi = 0.0;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const CycleFeatures& c = cycles[i];
    NormalizedCycle norm;
    norm.cycle_index = c.cycle_index;
    norm.r_star = scale(c.resistance, r_mm, constant_fill);
    norm.tmp_star = scale(c.tmp, tmp_mm, constant_fill);
    norm.j_star = scale(c.flux, j_mm, constant_fill);
    norm.rec_star = scale(c.recovery, rec_mm, constant_fill);
    norm.hi = health_index(norm.r_star, norm.tmp_star, norm.j_star,
                           norm.rec_star, weights);
    norm.dhi = (i == 0) ? 0.0 : norm.hi - prev_hi;
    prev_hi = norm.hi;
    out.push_back(norm);
  }
  return out;
}

}  // namespace ufprog
