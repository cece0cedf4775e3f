#pragma once

#include <filesystem>
#include <vector>

namespace absement {

/// Decoded mono audio. Samples are normalized to [-1, 1).
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;
};

/// Reads a RIFF/WAVE file holding 16-bit PCM (plain or WAVE_FORMAT_EXTENSIBLE).
/// Samples are scaled by 1/32768 and channels are averaged to mono.
///
/// Throws FileNotFoundError, MalformedFileError (broken RIFF structure) or
/// UnsupportedFormatError (anything other than 16-bit integer PCM).
Waveform load_wav(const std::filesystem::path& path);

/// Writes mono 16-bit PCM. Samples are rounded to the nearest multiple of
/// 1/32768 and clipped to the int16 range.
void write_wav(const std::filesystem::path& path, const Waveform& wave);

/// Multi-channel variant used by tests; `channels` are equal-length.
void write_wav(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& channels,
               int sample_rate);

}  // namespace absement
