#include "absement/feature_io.hpp"

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <system_error>

#include "absement/error.hpp"

namespace absement {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& value) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ProcessingError("number formatting failed");
  return std::string(buf, ptr);
}

std::string format_features(const FeatureMatrix& m, std::span<const std::string> comments) {
  std::string out;
  for (const auto& c : comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  out += "FEAT 1 " + std::to_string(m.frames()) + " " + std::to_string(m.coeffs()) + "\n";
  for (std::size_t t = 0; t < m.frames(); ++t) {
    const auto row = m.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ' ';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

FeatureFile parse_features(std::string_view text, std::string provenance) {
  FeatureFile file;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    return true;
  };
  auto fail = [&](const std::string& what) -> void {
    throw MalformedFileError("FEATv1 line " + std::to_string(line_no) + ": " + what);
  };

  std::string_view line;
  bool have_header = false;
  while (next_line(line)) {
    if (!line.empty() && line.front() == '#') {
      std::string_view c = line.substr(1);
      if (!c.empty() && c.front() == ' ') c.remove_prefix(1);
      if (!c.empty() && c.back() == '\r') c.remove_suffix(1);
      file.comments.emplace_back(c);
      continue;
    }
    have_header = true;
    break;
  }
  if (!have_header) fail("missing FEAT header");

  const auto header = split_ws(line);
  std::size_t frames = 0, coeffs = 0;
  if (header.size() != 4 || header[0] != "FEAT" || header[1] != "1" ||
      !parse_number(header[2], frames) || !parse_number(header[3], coeffs)) {
    fail("expected header 'FEAT 1 <T> <k>'");
  }
  if (frames == 0 || coeffs == 0) fail("frame and coefficient counts must be positive");

  std::vector<double> values;
  values.reserve(frames * coeffs);
  for (std::size_t t = 0; t < frames; ++t) {
    if (!next_line(line)) fail("expected " + std::to_string(frames) + " frames, got " +
                               std::to_string(t));
    const auto toks = split_ws(line);
    if (toks.size() != coeffs) {
      fail("expected " + std::to_string(coeffs) + " values, got " +
           std::to_string(toks.size()));
    }
    for (auto tok : toks) {
      double v = 0.0;
      if (!parse_number(tok, v)) fail("bad number '" + std::string(tok) + "'");
      values.push_back(v);
    }
  }
  while (next_line(line)) {
    if (!split_ws(line).empty()) fail("unexpected content after the last frame");
  }
  for (const auto& c : file.comments) {
    if (c.rfind("provenance: ", 0) == 0 && provenance.empty()) provenance = c.substr(12);
  }
  try {
    file.features = FeatureMatrix(frames, coeffs, std::move(values), std::move(provenance));
  } catch (const InvalidArgumentError& e) {
    throw MalformedFileError(std::string("FEATv1: ") + e.what());
  }
  return file;
}

void write_features(const std::filesystem::path& path, const FeatureMatrix& m,
                    std::span<const std::string> comments) {
  write_file_atomic(path, format_features(m, comments));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_features(text);
  } catch (const MalformedFileError& e) {
    throw MalformedFileError(path.string() + ": " + e.what());
  }
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  return read_feature_file(path).features;
}

std::string format_profile_csv(const DistanceProfile& profile) {
  std::string out = "frame_index,distance_sum\n";
  for (std::size_t t = 0; t < profile.per_frame.size(); ++t) {
    out += std::to_string(t + 1) + "," + format_double(profile.per_frame[t]) + "\n";
  }
  return out;
}

std::string format_path_csv(const WarpPath& path, std::span<const double> step_distances) {
  if (step_distances.size() != path.size()) {
    throw InvalidArgumentError("one step distance per path step required");
  }
  std::string out = "i,j,step_distance\n";
  for (std::size_t s = 0; s < path.size(); ++s) {
    out += std::to_string(path[s].i) + "," + std::to_string(path[s].j) + "," +
           format_double(step_distances[s]) + "\n";
  }
  return out;
}

std::string format_eval_csv(const EvalReport& report) {
  std::string out = "query,rank,word,scaled_absement\n";
  for (const auto& r : report.per_query) {
    const std::string q = r.query_label.value_or("");
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
      out += q + "," + std::to_string(i + 1) + "," + r.ranked[i].word + "," +
             format_double(r.ranked[i].scaled_absement) + "\n";
    }
  }
  return out;
}

std::string format_summary_csv(const EvalReport& report) {
  return "n,top1,topk,k\n" + std::to_string(report.n_queries) + "," +
         format_double(report.top1_accuracy) + "," + format_double(report.topk_accuracy) +
         "," + std::to_string(report.k) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ProcessingError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw ProcessingError("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ProcessingError("cannot move output into place: " + path.string());
  }
}

}  // namespace absement
