#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ufprog/config.hpp"
#include "ufprog/fuzzy.hpp"
#include "ufprog/segmentation.hpp"
#include "ufprog/types.hpp"

namespace ufprog {

// Immutable store of (signature, RUL) pairs drawn from failed runs. All
// signatures are encoded under the stored partitions; config_digest guards
// against querying with a differently configured pipeline.
struct ExemplarLibrary {
  std::vector<FuzzySignature> exemplars;
  FuzzyPartition hi_partition;
  FuzzyPartition dhi_partition;
  std::size_t window_length = kWindowLength;
  std::vector<std::size_t> source_run_ids;
  std::string config_digest;
  std::string build_timestamp;
};

struct Match {
  std::size_t exemplar_ref = 0;
  double similarity = 0.0;
  int rul = 0;
};

struct RuleTerm {
  std::size_t cycle_offset = 0;  // within the window, 0 = oldest
  int feature = 0;
  int label = 0;
  double degree = 0.0;
};

struct MinedRule {
  std::vector<RuleTerm> antecedents;  // sorted by degree, descending
  int consequent_rul = 0;
  double firing_strength = 0.0;
  std::size_t exemplar_ref = 0;
};

struct Prediction {
  double rul_estimate = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  double interval_level = 0.0;
  std::size_t window_length = kWindowLength;
  std::vector<Match> matches;
  std::vector<MinedRule> rules;
  std::size_t run_id = 0;
  std::size_t cycle_index = 0;
};

// One exemplar per labeled cycle with a full window of history
// (position >= window_length - 1 within its run).
ExemplarLibrary build_library(std::span<const Run> runs,
                              const PipelineConfig& config);

double jaccard_similarity(std::span<const double> a, std::span<const double> b,
                          double eps = kDefaultEps);

// Linear scan, sorted by similarity descending with ties broken by ascending
// exemplar index. exclude_run drops exemplars sourced from that run id.
std::vector<Match> retrieve_top_k(
    const FuzzySignature& query, const ExemplarLibrary& library, std::size_t k,
    std::optional<std::size_t> exclude_run = std::nullopt);

// Similarity-weighted mean of the matched consequents.
double predict_rul(std::span<const Match> matches,
                   Diagnostics* diag = nullptr);

// Similarity-weighted empirical quantiles of the matched consequents at
// (1 - level) / 2 and 1 - (1 - level) / 2, linearly interpolated between
// cumulative-weight midpoints.
std::pair<double, double> prediction_interval(std::span<const Match> matches,
                                              double level);

// Top 5 membership degrees of the matched exemplar, ties by lower position.
MinedRule mine_rule(const Match& match, const ExemplarLibrary& library);

// Window ending at within-run position t; requires t >= window_length - 1.
FuzzySignature signature_at(const Run& run, std::size_t t,
                            const FuzzyPartition& hi_partition,
                            const FuzzyPartition& dhi_partition,
                            std::size_t window_length);

Prediction predict(const Run& run, std::size_t t,
                   const ExemplarLibrary& library, const PipelineConfig& config,
                   std::optional<std::size_t> exclude_run = std::nullopt,
                   Diagnostics* diag = nullptr);

std::string explain(const Prediction& prediction);

}  // namespace ufprog
