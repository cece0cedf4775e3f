#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absement/manifest.hpp"
#include "absement/wav.hpp"

namespace absement {

/// Synthetic isolated-word corpus. Each word is a sequence of 2-4 harmonic
/// tone or chirp segments (300-900 ms in total); every speaker renders it with
/// a pitch offset, amplitude and duration jitter, plus optional white noise.
struct SynthConfig {
  std::size_t n_words = 20;
  std::size_t n_speakers = 3;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  double noise_level = 0.002;      ///< white noise std relative to full scale
  double pitch_jitter = 0.05;      ///< per-speaker pitch factor in 1 +- this
  double duration_jitter = 0.10;   ///< per-utterance duration factor 1 +- this
  double min_amplitude = 0.5;      ///< per-utterance peak in [min, max]
  double max_amplitude = 0.9;

  void validate() const;
};

struct SynthUtterance {
  std::string word;
  std::string speaker;
  Waveform wave;
};

std::string synth_word_label(std::size_t index);
std::string synth_speaker_label(std::size_t index);  ///< 0 -> "spk1"

/// Every (word, speaker) utterance, words outer, speakers inner.
std::vector<SynthUtterance> synth_utterances(const SynthConfig& cfg);

/// Writes `<word>__<speaker>.wav` files and `manifest.tsv` into out_dir and
/// returns the manifest.
Manifest synth_corpus(const SynthConfig& cfg,
                      const std::filesystem::path& out_dir);

}  // namespace absement
