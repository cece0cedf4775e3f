#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace absement {

struct ManifestRow {
  std::string word;
  std::string speaker;
  std::filesystem::path path;  ///< resolved against the manifest directory
};

/// Tab-separated, header `word\tspeaker\tpath`, one recording per row.
struct Manifest {
  std::vector<ManifestRow> rows;

  /// Throws InvalidArgumentError on an empty field or a repeated
  /// (word, speaker) pair.
  void validate() const;
  std::set<std::string> words() const;
};

/// Relative paths are resolved against the manifest's own directory.
Manifest read_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text,
                        const std::filesystem::path& base_dir);

/// Paths inside `base_dir` are written relative to it.
std::string format_manifest(const Manifest& m,
                            const std::filesystem::path& base_dir);

/// Rows whose speaker is in `speakers`; an empty set keeps everything.
Manifest select_speakers(const Manifest& m,
                         const std::set<std::string>& speakers);

}  // namespace absement
