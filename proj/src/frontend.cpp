#include "absement/frontend.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "absement/error.hpp"

namespace absement {
namespace {

// The FFTW planner is not reentrant; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    if (!in_ || !out_) throw ProcessingError("FFT buffer allocation failed");
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(),
                                 FFTW_ESTIMATE);
    if (plan_ == nullptr) throw ProcessingError("FFT plan creation failed");
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  double* input() noexcept { return in_.get(); }

  /// |X_k| for k in [0, n/2].
  void magnitudes(std::vector<double>& mags) {
    fftw_execute(plan_);
    mags.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) {
      mags[k] = std::hypot(out_[k][0], out_[k][1]);
    }
  }

 private:
  std::size_t n_;
  FftwBuffer<double> in_;
  FftwBuffer<fftw_complex> out_;
  fftw_plan plan_ = nullptr;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t ms_to_samples(double ms, int sample_rate) {
  return static_cast<std::size_t>(std::llround(ms * sample_rate / 1000.0));
}

std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

// Orthonormal DCT-II basis, n_out x n_in.
std::vector<double> dct_matrix(std::size_t n_out, std::size_t n_in) {
  std::vector<double> m(n_out * n_in);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n_in));
  const double scale = std::sqrt(2.0 / static_cast<double>(n_in));
  for (std::size_t j = 0; j < n_out; ++j) {
    for (std::size_t i = 0; i < n_in; ++i) {
      m[j * n_in + i] = (j == 0 ? scale0 : scale) *
                        std::cos(std::numbers::pi * static_cast<double>(j) *
                                 (static_cast<double>(i) + 0.5) /
                                 static_cast<double>(n_in));
    }
  }
  return m;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::size_t FrontendConfig::window_samples(int sample_rate) const {
  return ms_to_samples(window_ms, sample_rate);
}

std::size_t FrontendConfig::hop_samples(int sample_rate) const {
  return ms_to_samples(hop_ms, sample_rate);
}

void FrontendConfig::validate(int sample_rate) const {
  auto fail = [](const std::string& what) {
    throw InvalidArgumentError("invalid frontend config: " + what);
  };
  if (sample_rate <= 0) fail("sample rate must be positive");
  if (!(hop_ms > 0.0) || !(window_ms >= hop_ms)) fail("need window_ms >= hop_ms > 0");
  if (window_samples(sample_rate) == 0 || hop_samples(sample_rate) == 0) {
    fail("window or hop shorter than one sample");
  }
  if (n_coeffs == 0 || n_mel_filters == 0) fail("coefficient and filter counts must be positive");
  if (n_coeffs > n_mel_filters) fail("n_coeffs exceeds n_mel_filters");
  if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0)) fail("pre_emphasis must be in [0, 1)");
  const double nyquist = sample_rate / 2.0;
  const double high = mel_high_hz.value_or(nyquist);
  if (!(mel_low_hz >= 0.0) || !(mel_low_hz < high) || high > nyquist) {
    fail("mel band must satisfy 0 <= low < high <= sample_rate / 2");
  }
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
}

std::size_t frame_count(std::size_t n_samples, int sample_rate,
                        const FrontendConfig& cfg) {
  cfg.validate(sample_rate);
  const std::size_t win = cfg.window_samples(sample_rate);
  const std::size_t hop = cfg.hop_samples(sample_rate);
  if (n_samples < win) {
    throw InvalidArgumentError("signal of " + std::to_string(n_samples) +
                               " samples is shorter than one window (" +
                               std::to_string(win) + ")");
  }
  return (n_samples - win) / hop + 1;
}

double log_energy(std::span<const double> frame, double log_floor) {
  double energy = 0.0;
  for (double s : frame) energy += s * s;
  return std::log(std::max(energy, log_floor));
}

std::vector<double> mel_filterbank(const FrontendConfig& cfg, int sample_rate,
                                   std::size_t fft_size) {
  const std::size_t n_bins = fft_size / 2 + 1;
  const std::size_t n_filters = cfg.n_mel_filters;
  const double low = hz_to_mel(cfg.mel_low_hz);
  const double high = hz_to_mel(cfg.mel_high_hz.value_or(sample_rate / 2.0));

  std::vector<double> edges(n_filters + 2);
  for (std::size_t m = 0; m < edges.size(); ++m) {
    edges[m] = mel_to_hz(low + (high - low) * static_cast<double>(m) /
                                   static_cast<double>(n_filters + 1));
  }

  std::vector<double> bank(n_filters * n_bins, 0.0);
  for (std::size_t m = 0; m < n_filters; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      bank[m * n_bins + k] = w;
    }
  }
  return bank;
}

FeatureMatrix mfcc(const Waveform& wave, const FrontendConfig& cfg) {
  if (wave.samples.empty()) throw InvalidArgumentError("empty waveform");
  const int sr = wave.sample_rate;
  const std::size_t n_frames = frame_count(wave.samples.size(), sr, cfg);
  const std::size_t win = cfg.window_samples(sr);
  const std::size_t hop = cfg.hop_samples(sr);
  const std::size_t fft_size = next_pow2(win);
  const std::size_t n_bins = fft_size / 2 + 1;
  const std::size_t n_filters = cfg.n_mel_filters;
  const std::size_t k = cfg.n_coeffs;

  std::vector<double> signal(wave.samples.size());
  signal[0] = wave.samples[0];
  for (std::size_t n = 1; n < signal.size(); ++n) {
    signal[n] = wave.samples[n] - cfg.pre_emphasis * wave.samples[n - 1];
  }

  const std::vector<double> window = hamming(win);
  const std::vector<double> bank = mel_filterbank(cfg, sr, fft_size);
  const std::vector<double> dct = dct_matrix(k, n_filters);

  RealFft fft(fft_size);
  double* buf = fft.input();
  std::vector<double> mags;
  std::vector<double> log_mel(n_filters);
  std::vector<double> out(n_frames * k);

  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::span<const double> frame(signal.data() + t * hop, win);
    for (std::size_t i = 0; i < win; ++i) buf[i] = frame[i] * window[i];
    for (std::size_t i = win; i < fft_size; ++i) buf[i] = 0.0;
    fft.magnitudes(mags);

    for (std::size_t m = 0; m < n_filters; ++m) {
      const double* w = bank.data() + m * n_bins;
      double e = 0.0;
      for (std::size_t b = 0; b < n_bins; ++b) e += w[b] * mags[b];
      log_mel[m] = std::log(std::max(e, cfg.log_floor));
    }

    double* row = out.data() + t * k;
    for (std::size_t j = 1; j < k; ++j) {
      const double* basis = dct.data() + j * n_filters;
      double c = 0.0;
      for (std::size_t m = 0; m < n_filters; ++m) c += basis[m] * log_mel[m];
      row[j] = c;
    }
    row[0] = log_energy(frame, cfg.log_floor);
  }
  return FeatureMatrix(n_frames, k, std::move(out), "mfcc");
}

}  // namespace absement
