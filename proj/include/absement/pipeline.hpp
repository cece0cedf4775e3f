#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absement/dba.hpp"
#include "absement/frontend.hpp"
#include "absement/manifest.hpp"
#include "absement/recognizer.hpp"

namespace absement {

/// Settings shared by the batch commands.
struct RunConfig {
  FrontendConfig frontend;
  DbaConfig dba;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
  std::size_t threads = 0;  ///< 0 picks hardware concurrency
};

struct RowFailure {
  std::size_t row = 0;  ///< 1-based data row of the manifest
  std::string message;
  bool input_error = true;
};

struct BatchSummary {
  std::vector<std::filesystem::path> written;
  std::vector<RowFailure> failures;
};

/// `<word>__<speaker>.feat`
std::string feature_file_name(const ManifestRow& row);

/// Features for a manifest row: read from `<features_dir>/<word>__<speaker>.feat`
/// when a directory is given, read directly if the row points at a .feat file,
/// otherwise decoded from the WAV and featurized.
FeatureMatrix row_features(const ManifestRow& row, const FrontendConfig& cfg,
                           const std::optional<std::filesystem::path>&
                               features_dir = std::nullopt);

/// One FEATv1 file per row under cfg.output_dir. Failing rows are collected,
/// not thrown.
BatchSummary featurize_manifest(const Manifest& manifest, const RunConfig& cfg);

/// One `<word>__avg.feat` per word by barycenter averaging of that word's rows.
/// The initial sequence of each word is drawn from a single generator seeded
/// with cfg.seed, visiting words in sorted order and rows sorted by speaker.
/// Throws InputError if a word has fewer than two recordings.
BatchSummary average_manifest(const Manifest& manifest, const RunConfig& cfg,
                              const std::optional<std::filesystem::path>&
                                  features_dir = std::nullopt);

/// Loads every `*.feat` in `dir`; the label is the file stem up to the first
/// "__" (so `cat__avg.feat` -> "cat").
std::vector<LabeledFeatures> load_templates(const std::filesystem::path& dir);

/// Recognizes every manifest row against the lexicon and writes
/// `evaluation.csv` and `summary.csv` into cfg.output_dir.
EvalReport evaluate_manifest(const Manifest& queries, const Lexicon& lex,
                             const RunConfig& cfg,
                             const std::optional<std::filesystem::path>&
                                 features_dir = std::nullopt);

}  // namespace absement
