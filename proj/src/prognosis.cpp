#include "ufprog/prognosis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ufprog/errors.hpp"

namespace ufprog {

ExemplarLibrary build_library(std::span<const Run> runs,
                              const PipelineConfig& config) {
  ExemplarLibrary lib;
  lib.hi_partition = make_uniform_partition(config.hi_min, config.hi_max);
  lib.dhi_partition = make_uniform_partition(config.dhi_min, config.dhi_max);
  lib.window_length = config.window_length;
  lib.config_digest = config.digest();

  for (const Run& run : runs) {
    if (!run.reached_failure) continue;
    if (run.cycles.size() < lib.window_length) continue;
    lib.source_run_ids.push_back(run.run_id);
    for (std::size_t t = lib.window_length - 1; t < run.cycles.size(); ++t) {
      lib.exemplars.push_back(signature_at(run, t, lib.hi_partition,
                                           lib.dhi_partition,
                                           lib.window_length));
    }
  }
  if (lib.exemplars.empty()) {
    throw DataError(
        "empty library: no failed run supplies a full window of history");
  }
  return lib;
}

double jaccard_similarity(std::span<const double> a, std::span<const double> b,
                          double eps) {
  if (a.size() != b.size()) {
    throw InternalError("jaccard_similarity: signature lengths differ");
  }
  double min_sum = 0.0;
  double max_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    min_sum += std::min(a[i], b[i]);
    max_sum += std::max(a[i], b[i]);
  }
  return min_sum / (max_sum + eps);
}

std::vector<Match> retrieve_top_k(const FuzzySignature& query,
                                  const ExemplarLibrary& library,
                                  std::size_t k,
                                  std::optional<std::size_t> exclude_run) {
  if (library.exemplars.empty()) {
    throw DataError("retrieve_top_k: library is empty");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(library.exemplars.size());
  for (std::size_t i = 0; i < library.exemplars.size(); ++i) {
    const FuzzySignature& ex = library.exemplars[i];
    if (exclude_run && ex.run_id == *exclude_run) continue;
    scored.emplace_back(jaccard_similarity(query.values, ex.values), i);
  }
  if (scored.empty()) {
    throw DataError("retrieve_top_k: all exemplars excluded");
  }
  const std::size_t take = std::min(k, scored.size());
  const auto better = [](const std::pair<double, std::size_t>& a,
                         const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    better);
  std::vector<Match> matches;
  matches.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t ref = scored[i].second;
    matches.push_back({ref, scored[i].first,
                       library.exemplars[ref].rul.value_or(0)});
  }
  return matches;
}

double predict_rul(std::span<const Match> matches, Diagnostics* diag) {
  if (matches.empty()) {
    throw InternalError("predict_rul: no matches");
  }
  double weight_sum = 0.0;
  double weighted_rul = 0.0;
  for (const Match& m : matches) {
    weight_sum += m.similarity;
    weighted_rul += m.similarity * m.rul;
  }
  if (weight_sum <= 0.0) {
    if (diag != nullptr) {
      diag->zero_similarity_fallbacks += 1;
      diag->warn("all similarities zero; falling back to unweighted mean");
    }
    double sum = 0.0;
    for (const Match& m : matches) sum += m.rul;
    return sum / static_cast<double>(matches.size());
  }
  return weighted_rul / weight_sum;
}

namespace {

double weighted_quantile(const std::vector<Match>& sorted,
                         const std::vector<double>& midpoints, double q) {
  if (q <= midpoints.front()) return sorted.front().rul;
  if (q >= midpoints.back()) return sorted.back().rul;
  for (std::size_t i = 0; i + 1 < midpoints.size(); ++i) {
    if (q <= midpoints[i + 1]) {
      const double span = midpoints[i + 1] - midpoints[i];
      const double frac = span > 0.0 ? (q - midpoints[i]) / span : 0.0;
      return sorted[i].rul + frac * (sorted[i + 1].rul - sorted[i].rul);
    }
  }
  return sorted.back().rul;
}

}  // namespace

std::pair<double, double> prediction_interval(std::span<const Match> matches,
                                              double level) {
  if (matches.empty()) {
    throw InternalError("prediction_interval: no matches");
  }
  if (level <= 0.0 || level >= 1.0) {
    throw ConfigError("interval level must lie in (0, 1)");
  }
  std::vector<Match> sorted(matches.begin(), matches.end());
  std::sort(sorted.begin(), sorted.end(), [](const Match& a, const Match& b) {
    if (a.rul != b.rul) return a.rul < b.rul;
    return a.exemplar_ref < b.exemplar_ref;
  });
  double total = 0.0;
  for (const Match& m : sorted) total += m.similarity;
  std::vector<double> weights(sorted.size());
  if (total > 0.0) {
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      weights[i] = sorted[i].similarity / total;
    }
  } else {
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(sorted.size()));
  }
  std::vector<double> midpoints(sorted.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    midpoints[i] = cum + 0.5 * weights[i];
    cum += weights[i];
  }
  const double alpha = (1.0 - level) / 2.0;
  double lo = weighted_quantile(sorted, midpoints, alpha);
  double hi = weighted_quantile(sorted, midpoints, 1.0 - alpha);
  if (lo > hi) std::swap(lo, hi);
  return {lo, hi};
}

MinedRule mine_rule(const Match& match, const ExemplarLibrary& library) {
  if (match.exemplar_ref >= library.exemplars.size()) {
    throw InternalError("mine_rule: exemplar reference out of range");
  }
  const FuzzySignature& ex = library.exemplars[match.exemplar_ref];
  std::vector<std::size_t> order(ex.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min<std::size_t>(5, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&ex](std::size_t a, std::size_t b) {
                      if (ex.values[a] != ex.values[b]) {
                        return ex.values[a] > ex.values[b];
                      }
                      return a < b;
                    });
  MinedRule rule;
  rule.exemplar_ref = match.exemplar_ref;
  rule.consequent_rul = match.rul;
  rule.firing_strength = match.similarity;
  rule.antecedents.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const PositionInfo info = decode_position(order[i]);
    rule.antecedents.push_back(
        {info.cycle_offset, info.feature, info.label, ex.values[order[i]]});
  }
  return rule;
}

FuzzySignature signature_at(const Run& run, std::size_t t,
                            const FuzzyPartition& hi_partition,
                            const FuzzyPartition& dhi_partition,
                            std::size_t window_length) {
  if (t >= run.cycles.size()) {
    throw InternalError("signature_at: cycle position out of range");
  }
  if (t + 1 < window_length) {
    throw InternalError("signature_at: insufficient history for a window");
  }
  std::vector<WindowEntry> window;
  window.reserve(window_length);
  for (std::size_t i = t + 1 - window_length; i <= t; ++i) {
    window.push_back({run.cycles[i].hi, run.cycles[i].dhi});
  }
  FuzzySignature sig = encode_signature(window, hi_partition, dhi_partition,
                                        window_length);
  sig.run_id = run.run_id;
  sig.cycle_index = run.cycles[t].cycle_index;
  if (run.reached_failure) {
    sig.rul = run.rul_labels[t];
  }
  return sig;
}

Prediction predict(const Run& run, std::size_t t,
                   const ExemplarLibrary& library, const PipelineConfig& config,
                   std::optional<std::size_t> exclude_run, Diagnostics* diag) {
  const FuzzySignature query = signature_at(
      run, t, library.hi_partition, library.dhi_partition,
      library.window_length);
  Prediction pred;
  pred.run_id = run.run_id;
  pred.cycle_index = query.cycle_index;
  pred.matches = retrieve_top_k(query, library, config.top_k, exclude_run);
  pred.rul_estimate = predict_rul(pred.matches, diag);
  std::tie(pred.interval_lo, pred.interval_hi) =
      prediction_interval(pred.matches, config.interval_level);
  pred.interval_level = config.interval_level;
  pred.window_length = library.window_length;
  pred.rules.reserve(pred.matches.size());
  for (const Match& m : pred.matches) {
    pred.rules.push_back(mine_rule(m, library));
  }
  return pred;
}

namespace {

std::string offset_name(std::size_t cycle_offset, std::size_t window_length) {
  const std::size_t back = window_length - 1 - cycle_offset;
  if (back == 0) return "t";
  return "t-" + std::to_string(back);
}

}  // namespace

std::string explain(const Prediction& prediction) {
  std::ostringstream out;
  char buf[64];
  out << "Query: run " << prediction.run_id << ", cycle "
      << prediction.cycle_index << "\n";
  std::snprintf(buf, sizeof(buf), "RUL estimate: %.2f cycles\n",
                prediction.rul_estimate);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%.0f%% interval: [%.2f, %.2f] cycles\n",
                prediction.interval_level * 100.0, prediction.interval_lo,
                prediction.interval_hi);
  out << buf;
  for (std::size_t r = 0; r < prediction.rules.size(); ++r) {
    const MinedRule& rule = prediction.rules[r];
    std::snprintf(buf, sizeof(buf), "Rule %zu (Similarity = %.3f):\n", r + 1,
                  rule.firing_strength);
    out << buf;
    out << "  IF ";
    for (std::size_t a = 0; a < rule.antecedents.size(); ++a) {
      const RuleTerm& term = rule.antecedents[a];
      if (a > 0) out << " AND ";
      out << (term.feature == 0 ? "HI" : "dHI") << "_"
          << offset_name(term.cycle_offset, prediction.window_length) << " is "
          << kLinguisticLabels[static_cast<std::size_t>(term.label)];
      std::snprintf(buf, sizeof(buf), " (%.2f)", term.degree);
      out << buf;
    }
    out << " THEN RUL = " << rule.consequent_rul << " cycles\n";
  }
  return out.str();
}

}  // namespace ufprog
