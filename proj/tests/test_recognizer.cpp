#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "absement/dtw.hpp"
#include "absement/error.hpp"
#include "absement/frontend.hpp"
#include "absement/recognizer.hpp"
#include "test_support.hpp"

using namespace absement;
using namespace absement::testing;

namespace {

std::vector<LabeledFeatures> random_lexicon(std::mt19937_64& rng, std::size_t n) {
  std::vector<LabeledFeatures> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"w" + std::to_string(100 + i), random_matrix(rng, 10 + rng() % 20, 5)});
  }
  return out;
}

FeatureMatrix jitter(std::mt19937_64& rng, const FeatureMatrix& m, double sd) {
  std::normal_distribution<double> n(0.0, sd);
  auto v = m.values();
  for (auto& x : v) x += n(rng);
  return FeatureMatrix(m.frames(), m.coeffs(), v);
}

Waveform tone(double hz, std::size_t n, std::mt19937_64& rng, double noise) {
  std::normal_distribution<double> d(0.0, noise);
  Waveform w{std::vector<double>(n), 16000};
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = 0.5 * std::sin(2.0 * 3.141592653589793 * hz * double(i) / 16000.0) + d(rng);
  }
  return w;
}

}  // namespace

TEST(Lexicon, Build) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(build_lexicon(random_lexicon(rng, 1)).size(), 1u);
  auto dup = random_lexicon(rng, 3);
  dup[2].label = dup[0].label;
  EXPECT_THROW(build_lexicon(dup), InvalidArgumentError);
  EXPECT_THROW(build_lexicon({}), InvalidArgumentError);
  auto mixed = random_lexicon(rng, 2);
  mixed[1].features = random_matrix(rng, 4, 3);
  EXPECT_THROW(build_lexicon(mixed), InvalidArgumentError);
  auto blank = random_lexicon(rng, 2);
  blank[0].label.clear();
  EXPECT_THROW(build_lexicon(blank), InvalidArgumentError);
}

TEST(Lexicon, ThousandEntries) {
  std::vector<LabeledFeatures> t;
  for (int i = 0; i < 1000; ++i) {
    t.push_back({"word" + std::to_string(i), FeatureMatrix(3, 13, std::vector<double>(39, i))});
  }
  const auto lex = build_lexicon(std::move(t));
  EXPECT_EQ(lex.size(), 1000u);
  EXPECT_TRUE(lex.contains("word999"));
  EXPECT_FALSE(lex.contains("word1000"));
}

TEST(Recognize, ExactTemplateWins) {
  std::mt19937_64 rng(2);
  const auto entries = random_lexicon(rng, 8);
  const auto lex = build_lexicon(entries);
  const auto r = recognize(entries[5].features, lex, 3);
  EXPECT_EQ(r.best().word, entries[5].label);
  EXPECT_EQ(r.best().scaled_absement, 0.0);
  EXPECT_EQ(r.ranked.size(), 8u);
  EXPECT_EQ(r.top_k().size(), 3u);
  for (std::size_t i = 1; i < r.ranked.size(); ++i) {
    EXPECT_LE(r.ranked[i - 1].scaled_absement, r.ranked[i].scaled_absement);
  }
}

TEST(Recognize, SingleEntryAlwaysFirst) {
  std::mt19937_64 rng(3);
  const auto lex = build_lexicon(random_lexicon(rng, 1));
  const auto r = recognize(random_matrix(rng, 7, 5, 100.0), lex, 1);
  EXPECT_EQ(r.best().word, lex.entries()[0].label);
}

TEST(Recognize, TiesBrokenByWord) {
  const FeatureMatrix t(2, 1, {1.0, 1.0});
  const auto lex = build_lexicon({{"zeta", t}, {"alpha", t}, {"mid", t}});
  const auto r = recognize(FeatureMatrix(2, 1, {0.0, 0.0}), lex, 3);
  EXPECT_EQ(r.ranked[0].word, "alpha");
  EXPECT_EQ(r.ranked[1].word, "mid");
  EXPECT_EQ(r.ranked[2].word, "zeta");
}

TEST(Recognize, SeparatedTonesIdentifyNoisyCopy) {
  std::mt19937_64 rng(4);
  const double freqs[] = {300.0, 800.0, 2000.0};  // each pair > one octave apart
  std::vector<LabeledFeatures> entries;
  for (int i = 0; i < 3; ++i) {
    entries.push_back({"tone" + std::to_string(i), mfcc(tone(freqs[i], 6000, rng, 0.0))});
  }
  const auto lex = build_lexicon(entries);
  const auto query = mfcc(tone(800.0, 5600, rng, 0.02));
  const auto r = recognize(query, lex, 3);
  // Oracle: recompute all three scaled absements directly.
  std::vector<std::pair<double, std::string>> direct;
  for (const auto& e : entries) {
    direct.emplace_back(dtw_absement(query, e.features).cost / std::sqrt(double(e.features.frames())),
                        e.label);
  }
  std::sort(direct.begin(), direct.end());
  EXPECT_EQ(direct.front().second, "tone1");
  EXPECT_EQ(r.best().word, "tone1");
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.ranked[i].word, direct[i].second);
    EXPECT_TRUE(close_rel(r.ranked[i].scaled_absement, direct[i].first, 1e-12));
  }
}

TEST(Recognize, Errors) {
  std::mt19937_64 rng(5);
  const auto lex = build_lexicon(random_lexicon(rng, 3));
  EXPECT_THROW(recognize(random_matrix(rng, 5, 4), lex, 1), InvalidArgumentError);
  EXPECT_THROW(recognize(random_matrix(rng, 5, 5), lex, 0), InvalidArgumentError);
  EXPECT_THROW(recognize(random_matrix(rng, 5, 5), lex, 4), InvalidArgumentError);
}

TEST(Recognize, RankingInvariantToCommonCostScale) {
  std::mt19937_64 rng(6);
  const auto lex = build_lexicon(random_lexicon(rng, 15));
  const auto q = random_matrix(rng, 14, 5);
  const auto r = recognize(q, lex, 5);
  for (double factor : {0.001, 3.0, 1e4}) {
    std::vector<Candidate> scaled = r.ranked;
    for (auto& c : scaled) c.scaled_absement = scaled_absement(c.cost * factor, c.template_len);
    std::stable_sort(scaled.begin(), scaled.end(), [](const Candidate& a, const Candidate& b) {
      return a.scaled_absement < b.scaled_absement;
    });
    for (std::size_t i = 0; i < scaled.size(); ++i) EXPECT_EQ(scaled[i].word, r.ranked[i].word);
  }
}

TEST(Evaluate, TemplatesAsQueriesScorePerfectly) {
  std::mt19937_64 rng(7);
  const auto entries = random_lexicon(rng, 12);
  const auto lex = build_lexicon(entries);
  const auto rep = evaluate(entries, lex, 10);
  EXPECT_EQ(rep.n_queries, 12u);
  EXPECT_EQ(rep.top1_accuracy, 1.0);
  EXPECT_EQ(rep.topk_accuracy, 1.0);
}

TEST(Evaluate, UnknownLabelRejected) {
  std::mt19937_64 rng(8);
  const auto lex = build_lexicon(random_lexicon(rng, 3));
  const std::vector<LabeledFeatures> q{{"nope", random_matrix(rng, 4, 5)}};
  EXPECT_THROW(evaluate(q, lex, 1), InvalidArgumentError);
}

TEST(Evaluate, AccuracyMatchesRecountAndIsScheduleIndependent) {
  std::mt19937_64 rng(9);
  const auto entries = random_lexicon(rng, 20);
  const auto lex = build_lexicon(entries);
  std::vector<LabeledFeatures> queries;
  for (const auto& e : entries) queries.push_back({e.label, jitter(rng, e.features, 0.9)});

  const auto rep = evaluate(queries, lex, 3, 1);
  std::size_t hits1 = 0, hits3 = 0;
  for (const auto& r : rep.per_query) {
    ASSERT_EQ(r.ranked.size(), lex.size());
    hits1 += r.ranked[0].word == *r.query_label;
    for (std::size_t i = 0; i < 3; ++i) hits3 += r.ranked[i].word == *r.query_label;
  }
  EXPECT_EQ(rep.top1_accuracy, hits1 / 20.0);
  EXPECT_EQ(rep.topk_accuracy, hits3 / 20.0);
  EXPECT_LE(rep.top1_accuracy, rep.topk_accuracy);

  const auto parallel = evaluate(queries, lex, 3, 8);
  ASSERT_EQ(parallel.per_query.size(), rep.per_query.size());
  for (std::size_t q = 0; q < rep.per_query.size(); ++q) {
    for (std::size_t i = 0; i < lex.size(); ++i) {
      EXPECT_EQ(parallel.per_query[q].ranked[i].word, rep.per_query[q].ranked[i].word);
      EXPECT_EQ(parallel.per_query[q].ranked[i].scaled_absement,
                rep.per_query[q].ranked[i].scaled_absement);
    }
  }

  const auto full = rescore(rep.per_query, lex.size());
  EXPECT_EQ(full.topk_accuracy, 1.0);
  EXPECT_EQ(full.top1_accuracy, rep.top1_accuracy);
}
