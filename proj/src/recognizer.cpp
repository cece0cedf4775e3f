#include "absement/recognizer.hpp"

#include <algorithm>
#include <string>

#include "absement/dtw.hpp"
#include "absement/error.hpp"
#include "parallel.hpp"

namespace absement {
namespace {

bool by_word(const LabeledFeatures& a, const LabeledFeatures& b) { return a.label < b.label; }

bool rank_order(const Candidate& a, const Candidate& b) {
  if (a.scaled_absement != b.scaled_absement) return a.scaled_absement < b.scaled_absement;
  return a.word < b.word;
}

void check_k(std::size_t k, std::size_t size) {
  if (k < 1 || k > size) {
    throw InvalidArgumentError("k must be in [1, " + std::to_string(size) + "], got " +
                               std::to_string(k));
  }
}

std::size_t hits_at(const RecognitionResult& r, std::size_t k) {
  if (!r.query_label) return 0;
  const std::size_t limit = std::min(k, r.ranked.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (r.ranked[i].word == *r.query_label) return 1;
  }
  return 0;
}

}  // namespace

Lexicon Lexicon::build(std::vector<LabeledFeatures> templates) {
  if (templates.empty()) throw InvalidArgumentError("lexicon needs at least one template");
  std::sort(templates.begin(), templates.end(), by_word);
  const std::size_t k = templates.front().features.coeffs();
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto& t = templates[i];
    if (t.label.empty()) throw InvalidArgumentError("lexicon label must be nonempty");
    if (i > 0 && templates[i - 1].label == t.label) {
      throw InvalidArgumentError("duplicate lexicon label: " + t.label);
    }
    if (t.features.empty()) throw InvalidArgumentError("empty template for " + t.label);
    if (t.features.coeffs() != k) {
      throw InvalidArgumentError("template " + t.label + " has " +
                                 std::to_string(t.features.coeffs()) +
                                 " coefficients, expected " + std::to_string(k));
    }
  }
  Lexicon lex;
  lex.entries_ = std::move(templates);
  lex.coeffs_ = k;
  return lex;
}

bool Lexicon::contains(const std::string& word) const {
  return std::binary_search(entries_.begin(), entries_.end(), LabeledFeatures{word, {}},
                            by_word);
}

const FeatureMatrix& Lexicon::at(const std::string& word) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), LabeledFeatures{word, {}},
                             by_word);
  if (it == entries_.end() || it->label != word) {
    throw InvalidArgumentError("word not in lexicon: " + word);
  }
  return it->features;
}

RecognitionResult recognize(const FeatureMatrix& query, const Lexicon& lex, std::size_t k,
                            std::size_t threads) {
  check_k(k, lex.size());
  if (query.empty()) throw InvalidArgumentError("empty query");
  if (query.coeffs() != lex.coeffs()) {
    throw InvalidArgumentError("query has " + std::to_string(query.coeffs()) +
                               " coefficients, lexicon has " + std::to_string(lex.coeffs()));
  }
  const auto& entries = lex.entries();
  RecognitionResult r;
  r.k = k;
  r.ranked.resize(entries.size());
  detail::parallel_for(entries.size(), threads, [&](std::size_t i) {
    const auto& e = entries[i];
    const double cost = dtw_cost(query, e.features);
    r.ranked[i] = {e.label, scaled_absement(cost, e.features.frames()), cost,
                   e.features.frames()};
  });
  std::sort(r.ranked.begin(), r.ranked.end(), rank_order);
  return r;
}

EvalReport rescore(std::vector<RecognitionResult> per_query, std::size_t k) {
  EvalReport rep;
  rep.k = k;
  rep.n_queries = per_query.size();
  std::size_t top1 = 0, topk = 0;
  for (auto& r : per_query) {
    check_k(k, r.ranked.size());
    r.k = k;
    top1 += hits_at(r, 1);
    topk += hits_at(r, k);
  }
  if (rep.n_queries > 0) {
    rep.top1_accuracy = static_cast<double>(top1) / static_cast<double>(rep.n_queries);
    rep.topk_accuracy = static_cast<double>(topk) / static_cast<double>(rep.n_queries);
  }
  rep.per_query = std::move(per_query);
  return rep;
}

EvalReport evaluate(std::span<const LabeledFeatures> queries, const Lexicon& lex,
                    std::size_t k, std::size_t threads) {
  check_k(k, lex.size());
  for (const auto& q : queries) {
    if (!lex.contains(q.label)) {
      throw InvalidArgumentError("query label not in lexicon: " + q.label);
    }
  }
  std::vector<RecognitionResult> per_query(queries.size());
  // Fan out over queries; each recognition runs sequentially.
  detail::parallel_for(queries.size(), threads, [&](std::size_t i) {
    per_query[i] = recognize(queries[i].features, lex, k, 1);
    per_query[i].query_label = queries[i].label;
  });
  return rescore(std::move(per_query), k);
}

}  // namespace absement
