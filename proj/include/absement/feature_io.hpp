#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absement/dtw.hpp"
#include "absement/feature_matrix.hpp"
#include "absement/recognizer.hpp"

namespace absement {

/// FEATv1 text format:
///
///   # optional comment lines (metadata), each starting with '#'
///   FEAT 1 <T> <k>
///   <k whitespace-separated decimals>   (T lines, one per frame)
///
/// Values are written in shortest round-trip form, so read(write(m)) == m.
struct FeatureFile {
  FeatureMatrix features;
  std::vector<std::string> comments;  ///< without the leading "# "
};

std::string format_features(const FeatureMatrix& m,
                            std::span<const std::string> comments = {});
FeatureFile parse_features(std::string_view text, std::string provenance = {});

void write_features(const std::filesystem::path& path, const FeatureMatrix& m,
                    std::span<const std::string> comments = {});
FeatureFile read_feature_file(const std::filesystem::path& path);
FeatureMatrix read_features(const std::filesystem::path& path);

/// `frame_index,distance_sum`, frame_index 1-based.
std::string format_profile_csv(const DistanceProfile& profile);
/// `i,j,step_distance`.
std::string format_path_csv(const WarpPath& path,
                            std::span<const double> step_distances);
/// `query,rank,word,scaled_absement`, one row per (query, candidate).
std::string format_eval_csv(const EvalReport& report);
/// `n,top1,topk,k` header plus one row.
std::string format_summary_csv(const EvalReport& report);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file, then renames over `path`.
/// Throws ProcessingError on failure.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace absement
