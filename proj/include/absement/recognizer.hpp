#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absement/feature_matrix.hpp"

namespace absement {

struct LabeledFeatures {
  std::string label;
  FeatureMatrix features;
};

/// Word templates keyed by label, stored in label order.
class Lexicon {
 public:
  /// Throws InvalidArgumentError on an empty set, an empty or duplicate label,
  /// or templates with differing coefficient counts.
  static Lexicon build(std::vector<LabeledFeatures> templates);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t coeffs() const noexcept { return coeffs_; }
  const std::vector<LabeledFeatures>& entries() const noexcept {
    return entries_;
  }
  bool contains(const std::string& word) const;
  const FeatureMatrix& at(const std::string& word) const;

 private:
  std::vector<LabeledFeatures> entries_;
  std::size_t coeffs_ = 0;
};

inline Lexicon build_lexicon(std::vector<LabeledFeatures> templates) {
  return Lexicon::build(std::move(templates));
}

struct Candidate {
  std::string word;
  double scaled_absement = 0.0;
  double cost = 0.0;
  std::size_t template_len = 0;
};

struct RecognitionResult {
  std::optional<std::string> query_label;
  /// Every lexicon entry once, ascending scaled absement, ties by word.
  std::vector<Candidate> ranked;
  std::size_t k = 0;

  std::span<const Candidate> top_k() const {
    return std::span<const Candidate>(ranked).first(k);
  }
  const Candidate& best() const { return ranked.front(); }
};

struct EvalReport {
  std::size_t n_queries = 0;
  std::size_t k = 0;
  double top1_accuracy = 0.0;
  double topk_accuracy = 0.0;
  std::vector<RecognitionResult> per_query;
};

/// Scores the query against every template. Throws InvalidArgumentError on a
/// coefficient mismatch or k outside [1, lexicon size].
RecognitionResult recognize(const FeatureMatrix& query, const Lexicon& lex,
                            std::size_t k = 10, std::size_t threads = 1);

/// Recognizes every labeled query. Every label must exist in the lexicon.
EvalReport evaluate(std::span<const LabeledFeatures> queries,
                    const Lexicon& lex, std::size_t k = 10,
                    std::size_t threads = 1);

/// Recomputes the accuracies of stored rankings at a new k.
EvalReport rescore(std::vector<RecognitionResult> per_query, std::size_t k);

}  // namespace absement
