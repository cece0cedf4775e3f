#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "absement/feature_matrix.hpp"
#include "absement/wav.hpp"

namespace absement {

/// MFCC frontend settings. Defaults: 25 ms Hamming window, 10 ms hop,
/// 13 coefficients from 26 mel filters spanning 0 Hz to Nyquist,
/// pre-emphasis 0.97, orthonormal DCT-II, no liftering. The magnitude
/// spectrum comes from an FFT zero-padded to the next power of two.
struct FrontendConfig {
  double window_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t n_coeffs = 13;
  std::size_t n_mel_filters = 26;
  double pre_emphasis = 0.97;
  double mel_low_hz = 0.0;
  std::optional<double> mel_high_hz;  ///< nullopt means sample_rate / 2
  double log_floor = 1e-10;

  /// Throws InvalidArgumentError if the settings are inconsistent for the
  /// given sample rate.
  void validate(int sample_rate) const;

  std::size_t window_samples(int sample_rate) const;
  std::size_t hop_samples(int sample_rate) const;
};

/// mel(f) = 2595 log10(1 + f / 700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Number of full frames; the trailing partial frame is dropped.
/// Throws InvalidArgumentError when the signal is shorter than one window.
std::size_t frame_count(std::size_t n_samples, int sample_rate,
                        const FrontendConfig& cfg = {});

/// ln(max(sum of squares, log_floor)).
double log_energy(std::span<const double> frame, double log_floor = 1e-10);

/// Triangular filter weights, n_mel_filters x (fft_size / 2 + 1), row-major.
std::vector<double> mel_filterbank(const FrontendConfig& cfg, int sample_rate,
                                   std::size_t fft_size);

/// MFCC matrix of the whole waveform, column 0 replaced by the frame's log
/// energy (taken after pre-emphasis, before windowing).
FeatureMatrix mfcc(const Waveform& wave, const FrontendConfig& cfg = {});

}  // namespace absement
