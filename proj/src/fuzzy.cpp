#include "ufprog/fuzzy.hpp"

#include <cmath>

#include "ufprog/errors.hpp"

namespace ufprog {

FuzzyPartition make_uniform_partition(double lo, double hi) {
  if (!(lo < hi)) {
    throw ConfigError("partition range must satisfy lo < hi");
  }
  FuzzyPartition p;
  p.centers = {lo, 0.5 * (lo + hi), hi};
  p.sigma = 0.5 * (hi - lo) / 2.0;
  return p;
}

std::array<double, 3> membership(double x, const FuzzyPartition& partition) {
  std::array<double, 3> degrees;
  const double two_sigma_sq = 2.0 * partition.sigma * partition.sigma;
  for (std::size_t k = 0; k < 3; ++k) {
    const double d = x - partition.centers[k];
    degrees[k] = std::exp(-(d * d) / two_sigma_sq);
  }
  return degrees;
}

FuzzySignature encode_signature(std::span<const WindowEntry> window,
                                const FuzzyPartition& hi_partition,
                                const FuzzyPartition& dhi_partition,
                                std::size_t expected_length) {
  if (window.size() != expected_length) {
    throw InternalError("encode_signature: window length " +
                        std::to_string(window.size()) + ", expected " +
                        std::to_string(expected_length));
  }
  FuzzySignature sig;
  sig.values.resize(window.size() * kValuesPerCycle);
  for (std::size_t t = 0; t < window.size(); ++t) {
    const std::array<double, 3> hi_deg =
        membership(window[t].hi, hi_partition);
    const std::array<double, 3> dhi_deg =
        membership(window[t].dhi, dhi_partition);
    for (std::size_t k = 0; k < 3; ++k) {
      sig.values[t * kValuesPerCycle + k] = hi_deg[k];
      sig.values[t * kValuesPerCycle + 3 + k] = dhi_deg[k];
    }
  }
  return sig;
}

PositionInfo decode_position(std::size_t position) {
  PositionInfo info;
  info.cycle_offset = position / kValuesPerCycle;
  info.feature = static_cast<int>((position % kValuesPerCycle) / 3);
  info.label = static_cast<int>(position % 3);
  return info;
}

std::string position_feature_name(const PositionInfo& info) {
  return info.feature == 0 ? "HI" : "dHI";
}

}  // namespace ufprog
