#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "ufprog/errors.hpp"
#include "ufprog/prognosis.hpp"
#include "ufprog/rng.hpp"

using namespace ufprog;

namespace {

FuzzySignature random_signature(Rng& rng, std::size_t length = 120) {
  FuzzySignature sig;
  sig.values.resize(length);
  for (auto& v : sig.values) v = rng.next_unit();
  return sig;
}

double jaccard_oracle(const std::vector<double>& a,
                      const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::min(a[i], b[i]);
    den += std::max(a[i], b[i]);
  }
  return num / (den + 1e-9);
}

// A run whose health decays linearly from 1 to 0 and which carries countdown
// labels, handy for library construction.
Run linear_decay_run(std::size_t run_id, std::size_t n_cycles) {
  Run run;
  run.run_id = run_id;
  run.reached_failure = true;
  run.end_reason = RunEndReason::failure;
  for (std::size_t t = 0; t < n_cycles; ++t) {
    NormalizedCycle c;
    c.cycle_index = t;
    c.hi = 1.0 - static_cast<double>(t) / static_cast<double>(n_cycles - 1);
    c.dhi = (t == 0) ? 0.0 : -1.0 / static_cast<double>(n_cycles - 1);
    run.cycles.push_back(c);
    CycleFeatures f;
    f.cycle_index = t;
    run.features.push_back(f);
    run.rul_labels.push_back(static_cast<int>(n_cycles - 1 - t));
  }
  return run;
}

}  // namespace

TEST_CASE("jaccard similarity of a vector with itself is one") {
  Rng rng(1);
  auto sig = random_signature(rng);
  double s = jaccard_similarity(sig.values, sig.values);
  CHECK_GE(s, 1.0 - 1e-9);
  CHECK_LE(s, 1.0);
}

TEST_CASE("jaccard similarity of disjoint support is zero") {
  std::vector<double> ones(120, 1.0), zeros(120, 0.0);
  CHECK_EQ(jaccard_similarity(ones, zeros), doctest::Approx(0.0));
}

TEST_CASE("jaccard similarity matches the elementwise oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_signature(rng);
    auto b = random_signature(rng);
    double want = jaccard_oracle(a.values, b.values);
    CHECK_LE(std::fabs(jaccard_similarity(a.values, b.values) - want), 1e-15);
  }
}

TEST_CASE("jaccard similarity is exactly symmetric") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_signature(rng);
    auto b = random_signature(rng);
    CHECK_EQ(jaccard_similarity(a.values, b.values),
             jaccard_similarity(b.values, a.values));
  }
}

TEST_CASE("jaccard similarity stays within the unit interval") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_signature(rng);
    auto b = random_signature(rng);
    double s = jaccard_similarity(a.values, b.values);
    CHECK_GE(s, 0.0);
    CHECK_LE(s, 1.0);
  }
}

TEST_CASE("mismatched signature lengths are a contract violation") {
  std::vector<double> a(120, 0.5), b(60, 0.5);
  CHECK_THROWS_AS(jaccard_similarity(a, b), InternalError);
}

TEST_CASE("library construction takes one exemplar per full window") {
  PipelineConfig cfg;
  std::vector<Run> runs;
  runs.push_back(linear_decay_run(0, 25));
  auto lib = build_library(runs, cfg);
  // Windows end at positions 19 through 24.
  REQUIRE_EQ(lib.exemplars.size(), 6u);
  CHECK_EQ(lib.window_length, 20u);
  for (std::size_t i = 0; i < lib.exemplars.size(); ++i) {
    CHECK_EQ(lib.exemplars[i].cycle_index, 19u + i);
    REQUIRE(lib.exemplars[i].rul.has_value());
    CHECK_EQ(*lib.exemplars[i].rul, static_cast<int>(5 - i));
    CHECK_EQ(lib.exemplars[i].values.size(), 120u);
    CHECK_EQ(lib.exemplars[i].run_id, 0u);
  }
  REQUIRE_EQ(lib.source_run_ids.size(), 1u);
  CHECK_EQ(lib.source_run_ids[0], 0u);
  CHECK_EQ(lib.config_digest, cfg.digest());
}

TEST_CASE("short and censored runs contribute no exemplars") {
  PipelineConfig cfg;
  std::vector<Run> runs;
  runs.push_back(linear_decay_run(0, 25));

  Run censored = linear_decay_run(1, 40);
  censored.reached_failure = false;
  censored.rul_labels.clear();
  runs.push_back(censored);

  runs.push_back(linear_decay_run(2, 12));

  auto lib = build_library(runs, cfg);
  CHECK_EQ(lib.exemplars.size(), 6u);
  for (std::size_t ref : lib.source_run_ids) CHECK_EQ(ref, 0u);
}

TEST_CASE("exemplar counts follow the window arithmetic") {
  PipelineConfig cfg;
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Run> runs;
    std::size_t want = 0;
    std::size_t n_runs = static_cast<std::size_t>(rng.uniform_int(1, 6));
    for (std::size_t r = 0; r < n_runs; ++r) {
      std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 60));
      runs.push_back(linear_decay_run(r, n));
      if (n >= cfg.window_length) want += n - cfg.window_length + 1;
    }
    if (want == 0) {
      CHECK_THROWS_AS(build_library(runs, cfg), DataError);
    } else {
      CHECK_EQ(build_library(runs, cfg).exemplars.size(), want);
    }
  }
}

TEST_CASE("an empty library is a data error") {
  PipelineConfig cfg;
  std::vector<Run> none;
  CHECK_THROWS_AS(build_library(none, cfg), DataError);
}

TEST_CASE("retrieval returns everything when k exceeds the library") {
  PipelineConfig cfg;
  std::vector<Run> runs{linear_decay_run(0, 22)};
  auto lib = build_library(runs, cfg);
  REQUIRE_EQ(lib.exemplars.size(), 3u);
  auto matches = retrieve_top_k(lib.exemplars[0], lib, 10);
  CHECK_EQ(matches.size(), 3u);
}

TEST_CASE("an exemplar retrieves itself first") {
  PipelineConfig cfg;
  std::vector<Run> runs{linear_decay_run(0, 45)};
  auto lib = build_library(runs, cfg);
  auto matches = retrieve_top_k(lib.exemplars[7], lib, 5);
  REQUIRE_FALSE(matches.empty());
  CHECK_EQ(matches[0].exemplar_ref, 7u);
  CHECK_GE(matches[0].similarity, 1.0 - 1e-9);
}

TEST_CASE("excluding a source run removes its exemplars from retrieval") {
  PipelineConfig cfg;
  std::vector<Run> runs{linear_decay_run(0, 30), linear_decay_run(1, 30)};
  auto lib = build_library(runs, cfg);
  auto matches = retrieve_top_k(lib.exemplars[0], lib, 100, 0);
  REQUIRE_FALSE(matches.empty());
  for (const auto& m : matches)
    CHECK_EQ(lib.exemplars[m.exemplar_ref].run_id, 1u);

  // Excluding a run that contributed nothing changes nothing.
  auto all = retrieve_top_k(lib.exemplars[0], lib, 100, 1902);
  CHECK_EQ(all.size(), lib.exemplars.size());
}

TEST_CASE("excluding every run empties retrieval") {
  PipelineConfig cfg;
  std::vector<Run> runs{linear_decay_run(0, 25)};
  auto lib = build_library(runs, cfg);
  CHECK_THROWS_AS(retrieve_top_k(lib.exemplars[0], lib, 10, 0), DataError);
}

TEST_CASE("retrieval agrees with an exhaustive sort, ties included") {
  PipelineConfig cfg;
  Rng rng(606);
  // Duplicate runs produce duplicate signatures, forcing similarity ties.
  std::vector<Run> runs;
  for (std::size_t r = 0; r < 8; ++r)
    runs.push_back(linear_decay_run(r, 20 + (r % 3)));
  auto lib = build_library(runs, cfg);
  REQUIRE_GT(lib.exemplars.size(), 10u);

  for (int trial = 0; trial < 25; ++trial) {
    auto query = random_signature(rng);
    auto got = retrieve_top_k(query, lib, 10);

    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < lib.exemplars.size(); ++i)
      ranked.emplace_back(jaccard_similarity(query.values,
                                             lib.exemplars[i].values),
                          i);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });

    REQUIRE_EQ(got.size(), 10u);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK_EQ(got[i].exemplar_ref, ranked[i].second);
      CHECK_EQ(got[i].similarity, doctest::Approx(ranked[i].first));
      CHECK_EQ(got[i].rul, *lib.exemplars[ranked[i].second].rul);
    }
  }
}

TEST_CASE("point prediction is the similarity-weighted mean") {
  std::vector<Match> even{{0, 0.5, 10}, {1, 0.5, 20}};
  CHECK_EQ(predict_rul(even), doctest::Approx(15.0));

  std::vector<Match> single{{4, 0.9, 11}};
  CHECK_EQ(predict_rul(single), doctest::Approx(11.0));

  std::vector<Match> skew{{0, 0.9, 10}, {1, 0.1, 20}};
  CHECK_EQ(predict_rul(skew), doctest::Approx(11.0));
}

TEST_CASE("zero total similarity falls back to the plain mean") {
  Diagnostics diag;
  std::vector<Match> dead{{0, 0.0, 10}, {1, 0.0, 30}};
  CHECK_EQ(predict_rul(dead, &diag), doctest::Approx(20.0));
  CHECK_EQ(diag.zero_similarity_fallbacks, 1u);
  CHECK_FALSE(diag.warnings.empty());
}

TEST_CASE("prediction stays inside the consequent envelope") {
  Rng rng(21);
  for (int trial = 0; trial < 10000; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<Match> matches;
    int lo = 1000, hi = -1000;
    for (std::size_t i = 0; i < n; ++i) {
      Match m;
      m.exemplar_ref = i;
      m.similarity = rng.next_unit();
      m.rul = rng.uniform_int(0, 80);
      lo = std::min(lo, m.rul);
      hi = std::max(hi, m.rul);
      matches.push_back(m);
    }
    double est = predict_rul(matches);
    CHECK_GE(est, static_cast<double>(lo) - 1e-9);
    CHECK_LE(est, static_cast<double>(hi) + 1e-9);
  }
}

TEST_CASE("equal similarities reduce prediction to the arithmetic mean") {
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 15));
    double s = rng.uniform(0.05, 1.0);
    std::vector<Match> matches;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Match m;
      m.exemplar_ref = i;
      m.similarity = s;
      m.rul = rng.uniform_int(0, 60);
      sum += m.rul;
      matches.push_back(m);
    }
    double want = sum / static_cast<double>(n);
    CHECK_EQ(predict_rul(matches), doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("interval of ten equally weighted consequents") {
  std::vector<Match> matches;
  for (int r = 1; r <= 10; ++r)
    matches.push_back({static_cast<std::size_t>(r - 1), 0.5, r});
  auto [lo, hi] = prediction_interval(matches, 0.8);
  CHECK_EQ(lo, doctest::Approx(1.5).epsilon(1e-12));
  CHECK_EQ(hi, doctest::Approx(9.5).epsilon(1e-12));
}

TEST_CASE("interval collapses for a single match") {
  std::vector<Match> one{{0, 0.7, 11}};
  auto [lo, hi] = prediction_interval(one, 0.8);
  CHECK_EQ(lo, doctest::Approx(11.0));
  CHECK_EQ(hi, doctest::Approx(11.0));
}

TEST_CASE("identical consequents collapse the interval to a point") {
  std::vector<Match> matches{{0, 0.3, 24}, {1, 0.6, 24}, {2, 0.1, 24}};
  auto [lo, hi] = prediction_interval(matches, 0.8);
  CHECK_EQ(lo, doctest::Approx(24.0).epsilon(1e-12));
  CHECK_EQ(hi, doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("interval bounds are monotone in the level") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Match> matches;
    std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 12));
    for (std::size_t i = 0; i < n; ++i)
      matches.push_back({i, rng.uniform(0.05, 1.0), rng.uniform_int(0, 60)});
    auto [lo80, hi80] = prediction_interval(matches, 0.8);
    auto [lo50, hi50] = prediction_interval(matches, 0.5);
    CHECK_LE(lo80, lo50 + 1e-12);
    CHECK_GE(hi80, hi50 - 1e-12);
    int mn = 1000, mx = -1000;
    for (const auto& m : matches) {
      mn = std::min(mn, m.rul);
      mx = std::max(mx, m.rul);
    }
    CHECK_GE(lo80, static_cast<double>(mn) - 1e-12);
    CHECK_LE(hi80, static_cast<double>(mx) + 1e-12);
    CHECK_LE(lo80, hi80 + 1e-12);
  }
}

TEST_CASE("interval rejects bad inputs") {
  std::vector<Match> none;
  CHECK_THROWS_AS(predict_rul(none), InternalError);
  CHECK_THROWS_AS(prediction_interval(none, 0.8), InternalError);
  std::vector<Match> one{{0, 0.5, 5}};
  CHECK_THROWS_AS(prediction_interval(one, 0.0), ConfigError);
  CHECK_THROWS_AS(prediction_interval(one, 1.0), ConfigError);
  CHECK_THROWS_AS(prediction_interval(one, -0.2), ConfigError);
}

TEST_CASE("zero-weight interval degrades to equal weighting") {
  std::vector<Match> dead;
  for (int r = 1; r <= 10; ++r)
    dead.push_back({static_cast<std::size_t>(r - 1), 0.0, r});
  auto [lo, hi] = prediction_interval(dead, 0.8);
  CHECK_EQ(lo, doctest::Approx(1.5).epsilon(1e-12));
  CHECK_EQ(hi, doctest::Approx(9.5).epsilon(1e-12));
}

TEST_CASE("mined antecedents are the strongest degrees in order") {
  PipelineConfig cfg;
  std::vector<Run> runs{linear_decay_run(0, 24)};
  auto lib = build_library(runs, cfg);

  Match m;
  m.exemplar_ref = 2;
  m.similarity = 0.9;
  m.rul = *lib.exemplars[2].rul;
  MinedRule rule = mine_rule(m, lib);

  REQUIRE_EQ(rule.antecedents.size(), 5u);
  CHECK_EQ(rule.consequent_rul, m.rul);
  CHECK_EQ(rule.firing_strength, doctest::Approx(0.9));
  CHECK_EQ(rule.exemplar_ref, 2u);
  for (std::size_t i = 1; i < rule.antecedents.size(); ++i)
    CHECK_LE(rule.antecedents[i].degree, rule.antecedents[i - 1].degree);

  const auto& values = lib.exemplars[2].values;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (values[a] != values[b]) return values[a] > values[b];
                     return a < b;
                   });
  for (std::size_t i = 0; i < 5; ++i) {
    PositionInfo info = decode_position(order[i]);
    CHECK_EQ(rule.antecedents[i].cycle_offset, info.cycle_offset);
    CHECK_EQ(rule.antecedents[i].feature, info.feature);
    CHECK_EQ(rule.antecedents[i].label, info.label);
    CHECK_EQ(rule.antecedents[i].degree, doctest::Approx(values[order[i]]));
  }
}

TEST_CASE("degree ties in mining break toward earlier positions") {
  PipelineConfig cfg;
  ExemplarLibrary lib;
  lib.hi_partition = make_uniform_partition(0.0, 1.0);
  lib.dhi_partition = make_uniform_partition(-1.0, 1.0);
  lib.window_length = 20;
  FuzzySignature flat;
  flat.values.assign(120, 0.25);
  flat.rul = 7;
  lib.exemplars.push_back(flat);
  lib.source_run_ids.push_back(0);

  Match m;
  m.exemplar_ref = 0;
  m.similarity = 0.5;
  m.rul = 7;
  MinedRule rule = mine_rule(m, lib);
  REQUIRE_EQ(rule.antecedents.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    PositionInfo info = decode_position(i);
    CHECK_EQ(rule.antecedents[i].cycle_offset, info.cycle_offset);
    CHECK_EQ(rule.antecedents[i].feature, info.feature);
    CHECK_EQ(rule.antecedents[i].label, info.label);
  }
}

TEST_CASE("signature windows line up with run positions") {
  PipelineConfig cfg;
  Run run = linear_decay_run(3, 30);
  auto hi_p = make_uniform_partition(cfg.hi_min, cfg.hi_max);
  auto dhi_p = make_uniform_partition(cfg.dhi_min, cfg.dhi_max);

  auto sig = signature_at(run, 19, hi_p, dhi_p, 20);
  CHECK_EQ(sig.run_id, 3u);
  CHECK_EQ(sig.cycle_index, 19u);
  REQUIRE(sig.rul.has_value());
  CHECK_EQ(*sig.rul, 10);

  // The window covers cycles 0..19 oldest first; check both ends.
  auto first = membership(run.cycles[0].hi, hi_p);
  auto last = membership(run.cycles[19].hi, hi_p);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK_EQ(sig.values[k], doctest::Approx(first[k]).epsilon(1e-12));
    CHECK_EQ(sig.values[6 * 19 + k], doctest::Approx(last[k]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(signature_at(run, 18, hi_p, dhi_p, 20), InternalError);
  CHECK_THROWS_AS(signature_at(run, 30, hi_p, dhi_p, 20), InternalError);
}

TEST_CASE("predict stitches retrieval, weighting and mining together") {
  PipelineConfig cfg;
  std::vector<Run> runs;
  for (std::size_t r = 0; r < 4; ++r)
    runs.push_back(linear_decay_run(r, 26 + 2 * r));
  auto lib = build_library(runs, cfg);

  Run query_run = linear_decay_run(9, 28);
  Prediction p = predict(query_run, 21, lib, cfg);
  CHECK_EQ(p.run_id, 9u);
  CHECK_EQ(p.cycle_index, 21u);
  CHECK_EQ(p.window_length, 20u);
  CHECK_EQ(p.interval_level, doctest::Approx(0.8));
  REQUIRE_FALSE(p.matches.empty());
  CHECK_LE(p.matches.size(), cfg.top_k);
  REQUIRE_EQ(p.rules.size(), p.matches.size());
  for (std::size_t i = 0; i < p.matches.size(); ++i) {
    CHECK_EQ(p.rules[i].exemplar_ref, p.matches[i].exemplar_ref);
    CHECK_EQ(p.rules[i].consequent_rul, p.matches[i].rul);
  }
  int rul_min = 1 << 20, rul_max = -(1 << 20);
  for (const auto& m : p.matches) {
    rul_min = std::min(rul_min, m.rul);
    rul_max = std::max(rul_max, m.rul);
  }
  CHECK_GE(p.rul_estimate, static_cast<double>(rul_min) - 1e-9);
  CHECK_LE(p.rul_estimate, static_cast<double>(rul_max) + 1e-9);
  CHECK_LE(p.interval_lo, p.interval_hi + 1e-12);
  CHECK_GE(p.interval_lo, static_cast<double>(rul_min) - 1e-9);
  CHECK_LE(p.interval_hi, static_cast<double>(rul_max) + 1e-9);

  // Same-run exclusion must drop exemplars from the excluded source.
  Prediction q = predict(runs[0], 21, lib, cfg, 0);
  for (const auto& m : q.matches)
    CHECK_NE(lib.exemplars[m.exemplar_ref].run_id, 0u);
}

TEST_CASE("prediction is deterministic") {
  PipelineConfig cfg;
  std::vector<Run> runs;
  for (std::size_t r = 0; r < 3; ++r)
    runs.push_back(linear_decay_run(r, 30 + r));
  auto lib = build_library(runs, cfg);
  Run query = linear_decay_run(7, 25);

  Prediction a = predict(query, 20, lib, cfg);
  Prediction b = predict(query, 20, lib, cfg);
  CHECK_EQ(a.rul_estimate, b.rul_estimate);
  CHECK_EQ(a.interval_lo, b.interval_lo);
  CHECK_EQ(a.interval_hi, b.interval_hi);
  REQUIRE_EQ(a.matches.size(), b.matches.size());
  for (std::size_t i = 0; i < a.matches.size(); ++i) {
    CHECK_EQ(a.matches[i].exemplar_ref, b.matches[i].exemplar_ref);
    CHECK_EQ(a.matches[i].similarity, b.matches[i].similarity);
  }
}

TEST_CASE("explanations follow the rule template") {
  PipelineConfig cfg;
  std::vector<Run> runs;
  for (std::size_t r = 0; r < 3; ++r)
    runs.push_back(linear_decay_run(r, 28));
  auto lib = build_library(runs, cfg);
  Run query = linear_decay_run(5, 24);
  Prediction p = predict(query, 21, lib, cfg);

  std::string text = explain(p);
  CHECK_NE(text.find("Query: run 5, cycle 21"), std::string::npos);
  CHECK_NE(text.find("RUL estimate:"), std::string::npos);
  CHECK_NE(text.find("80% interval: ["), std::string::npos);
  CHECK_NE(text.find("Rule 1 (Similarity = "), std::string::npos);
  CHECK_NE(text.find(" IF "), std::string::npos);
  CHECK_NE(text.find(" AND "), std::string::npos);
  CHECK_NE(text.find(" THEN RUL = "), std::string::npos);
  CHECK_NE(text.find(" cycles"), std::string::npos);
  CHECK_NE(text.find("_t"), std::string::npos);

  // Rules are numbered in match order.
  std::size_t r1 = text.find("Rule 1 ");
  std::size_t r2 = text.find("Rule 2 ");
  REQUIRE_NE(r1, std::string::npos);
  REQUIRE_NE(r2, std::string::npos);
  CHECK_LT(r1, r2);
}

TEST_CASE("offset naming in explanations counts back from t") {
  Prediction p;
  p.rul_estimate = 12.0;
  p.interval_lo = 10.0;
  p.interval_hi = 14.0;
  p.interval_level = 0.8;
  p.window_length = 20;
  p.run_id = 1;
  p.cycle_index = 30;
  Match m;
  m.exemplar_ref = 0;
  m.similarity = 0.5;
  m.rul = 12;
  p.matches.push_back(m);
  MinedRule rule;
  rule.exemplar_ref = 0;
  rule.consequent_rul = 12;
  rule.firing_strength = 0.5;
  rule.antecedents.push_back({19, 0, 2, 1.0});
  rule.antecedents.push_back({18, 1, 1, 0.9});
  rule.antecedents.push_back({0, 0, 0, 0.8});
  p.rules.push_back(rule);

  std::string text = explain(p);
  CHECK_NE(text.find("HI_t is High (1.00)"), std::string::npos);
  CHECK_NE(text.find("dHI_t-1 is Medium (0.90)"), std::string::npos);
  CHECK_NE(text.find("HI_t-19 is Low (0.80)"), std::string::npos);
  CHECK_NE(text.find("THEN RUL = 12 cycles"), std::string::npos);
}
