#include "absement/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "absement/error.hpp"
#include "absement/feature_io.hpp"

namespace absement {
namespace {

struct Partial {
  double f_start = 0.0;
  double f_end = 0.0;
  double amp = 0.0;
};

struct Segment {
  double weight = 1.0;  // share of the word's duration
  std::vector<Partial> partials;
};

struct WordSpec {
  double duration_s = 0.0;
  std::vector<Segment> segments;
};

constexpr double kMinHz = 150.0;
constexpr double kMaxHz = 5000.0;
constexpr double kEdgeSeconds = 0.01;

WordSpec draw_word(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WordSpec w;
  w.duration_s = 0.3 + 0.6 * unit(rng);
  const std::size_t n_segments = 2 + rng() % 3;
  for (std::size_t s = 0; s < n_segments; ++s) {
    Segment seg;
    seg.weight = 0.5 + unit(rng);
    const bool chirp = unit(rng) < 0.5;
    const std::size_t n_partials = 2 + rng() % 2;
    for (std::size_t p = 0; p < n_partials; ++p) {
      Partial part;
      part.f_start = 200.0 * std::pow(20.0, unit(rng));  // 200 Hz .. 4 kHz
      part.f_end = chirp ? std::clamp(part.f_start * std::pow(2.0, 2.0 * unit(rng) - 1.0),
                                      kMinHz, kMaxHz)
                         : part.f_start;
      part.amp = 0.3 + 0.7 * unit(rng);
      seg.partials.push_back(part);
    }
    w.segments.push_back(std::move(seg));
  }
  return w;
}

std::vector<double> render(const WordSpec& w, double pitch, double duration_factor,
                           double amplitude, int sample_rate) {
  const auto n = static_cast<std::size_t>(
      std::llround(w.duration_s * duration_factor * sample_rate));
  std::vector<double> out(n, 0.0);
  double total_weight = 0.0;
  for (const auto& s : w.segments) total_weight += s.weight;

  const double edge = kEdgeSeconds * sample_rate;
  std::size_t begin = 0;
  double cum = 0.0;
  for (std::size_t si = 0; si < w.segments.size(); ++si) {
    const auto& seg = w.segments[si];
    cum += seg.weight;
    const std::size_t end = si + 1 == w.segments.size()
                                ? n
                                : static_cast<std::size_t>(std::llround(cum / total_weight * n));
    const std::size_t len = end > begin ? end - begin : 0;
    for (const auto& part : seg.partials) {
      double phase = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        const double frac = len > 1 ? static_cast<double>(t) / static_cast<double>(len - 1) : 0.0;
        const double f = pitch * (part.f_start + (part.f_end - part.f_start) * frac);
        // Raised-cosine ramps at both segment edges.
        const double dist = std::min(static_cast<double>(t), static_cast<double>(len - 1 - t));
        const double env =
            dist >= edge ? 1.0 : 0.5 - 0.5 * std::cos(std::numbers::pi * dist / edge);
        out[begin + t] += part.amp * env * std::sin(phase);
        phase += 2.0 * std::numbers::pi * f / sample_rate;
      }
    }
    begin = end;
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= amplitude / peak;
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_words < 1) throw InvalidArgumentError("n_words must be at least 1");
  if (n_speakers < 3) {
    throw InvalidArgumentError("n_speakers must be at least 3 (two template speakers and one query speaker)");
  }
  if (sample_rate < 2 * static_cast<int>(kMaxHz * 1.1)) {
    throw InvalidArgumentError("sample_rate too low for the synthetic tone range");
  }
  if (!(noise_level >= 0.0) || !(pitch_jitter >= 0.0 && pitch_jitter < 1.0) ||
      !(duration_jitter >= 0.0 && duration_jitter < 1.0) ||
      !(min_amplitude > 0.0 && min_amplitude <= max_amplitude && max_amplitude < 1.0)) {
    throw InvalidArgumentError("invalid synthetic corpus jitter settings");
  }
}

std::string synth_word_label(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "word%03zu", index + 1);
  return buf;
}

std::string synth_speaker_label(std::size_t index) { return "spk" + std::to_string(index + 1); }

std::vector<SynthUtterance> synth_utterances(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<WordSpec> words;
  for (std::size_t w = 0; w < cfg.n_words; ++w) words.push_back(draw_word(rng));

  std::vector<double> pitch(cfg.n_speakers);
  for (auto& p : pitch) p = 1.0 + cfg.pitch_jitter * (2.0 * unit(rng) - 1.0);

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SynthUtterance> out;
  out.reserve(cfg.n_words * cfg.n_speakers);
  for (std::size_t w = 0; w < cfg.n_words; ++w) {
    for (std::size_t s = 0; s < cfg.n_speakers; ++s) {
      const double dur = 1.0 + cfg.duration_jitter * (2.0 * unit(rng) - 1.0);
      const double amp = cfg.min_amplitude + (cfg.max_amplitude - cfg.min_amplitude) * unit(rng);
      SynthUtterance u{synth_word_label(w), synth_speaker_label(s), {}};
      u.wave.sample_rate = cfg.sample_rate;
      u.wave.samples = render(words[w], pitch[s], dur, amp, cfg.sample_rate);
      if (cfg.noise_level > 0.0) {
        for (double& v : u.wave.samples) v += cfg.noise_level * noise(rng);
      }
      out.push_back(std::move(u));
    }
  }
  return out;
}

Manifest synth_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  const auto utterances = synth_utterances(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ProcessingError("cannot create " + out_dir.string());
  Manifest m;
  for (const auto& u : utterances) {
    const auto path = out_dir / (u.word + "__" + u.speaker + ".wav");
    write_wav(path, u.wave);
    m.rows.push_back({u.word, u.speaker, path});
  }
  write_file_atomic(out_dir / "manifest.tsv", format_manifest(m, out_dir));
  return m;
}

}  // namespace absement
