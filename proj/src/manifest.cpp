#include "absement/manifest.hpp"

#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "absement/error.hpp"
#include "absement/feature_io.hpp"

namespace absement {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

void Manifest::validate() const {
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.word.empty() || row.speaker.empty() || row.path.empty()) {
      throw InvalidArgumentError("manifest row " + std::to_string(r + 1) + " has an empty field");
    }
    if (!seen.emplace(row.word, row.speaker).second) {
      throw InvalidArgumentError("manifest row " + std::to_string(r + 1) +
                                 " repeats (word, speaker) = (" + row.word + ", " +
                                 row.speaker + ")");
    }
  }
}

std::set<std::string> Manifest::words() const {
  std::set<std::string> w;
  for (const auto& r : rows) w.insert(r.word);
  return w;
}

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  Manifest m;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (!header) {
      if (fields != std::vector<std::string>{"word", "speaker", "path"}) {
        throw MalformedFileError("manifest must start with header 'word\\tspeaker\\tpath'");
      }
      header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw MalformedFileError("manifest line " + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
    }
    std::filesystem::path p = fields[2];
    if (p.is_relative()) p = base_dir / p;
    m.rows.push_back({fields[0], fields[1], p.lexically_normal()});
  }
  if (!header) throw MalformedFileError("manifest is empty");
  m.validate();
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

std::string format_manifest(const Manifest& m, const std::filesystem::path& base_dir) {
  std::string out = "word\tspeaker\tpath\n";
  const auto base = base_dir.lexically_normal();
  for (const auto& r : m.rows) {
    auto rel = r.path.lexically_relative(base);
    const bool inside = !rel.empty() && *rel.begin() != "..";
    out += r.word + "\t" + r.speaker + "\t" + (inside ? rel : r.path).generic_string() + "\n";
  }
  return out;
}

Manifest select_speakers(const Manifest& m, const std::set<std::string>& speakers) {
  if (speakers.empty()) return m;
  Manifest out;
  for (const auto& r : m.rows) {
    if (speakers.count(r.speaker)) out.rows.push_back(r);
  }
  return out;
}

}  // namespace absement
