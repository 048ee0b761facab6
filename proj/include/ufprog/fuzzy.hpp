#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ufprog {

inline constexpr std::size_t kWindowLength = 20;
inline constexpr std::size_t kValuesPerCycle = 6;

inline constexpr std::array<const char*, 3> kLinguisticLabels = {
    "Low", "Medium", "High"};

struct FuzzyPartition {
  std::array<double, 3> centers{};
  double sigma = 0.0;
};

// centers = [lo, mid, hi], sigma = half the center spacing.
FuzzyPartition make_uniform_partition(double lo, double hi);

// Raw Gaussian degrees for the three linguistic terms; not renormalized.
std::array<double, 3> membership(double x, const FuzzyPartition& partition);

struct WindowEntry {
  double hi = 0.0;
  double dhi = 0.0;
};

// Membership vector over a window of (hi, dhi) pairs, oldest first, laid out
// per cycle as (HI-Low, HI-Medium, HI-High, dHI-Low, dHI-Medium, dHI-High).
struct FuzzySignature {
  std::vector<double> values;
  std::size_t run_id = 0;
  std::size_t cycle_index = 0;
  std::optional<int> rul;
};

FuzzySignature encode_signature(std::span<const WindowEntry> window,
                                const FuzzyPartition& hi_partition,
                                const FuzzyPartition& dhi_partition,
                                std::size_t expected_length = kWindowLength);

struct PositionInfo {
  std::size_t cycle_offset;  // 0 = oldest cycle in the window
  int feature;               // 0 = HI, 1 = dHI
  int label;                 // 0 = Low, 1 = Medium, 2 = High
};

PositionInfo decode_position(std::size_t position);

std::string position_feature_name(const PositionInfo& info);

}  // namespace ufprog
