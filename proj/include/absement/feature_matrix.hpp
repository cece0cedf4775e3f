#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace absement {

/// Frames x coefficients real matrix, row-major. Row t is the feature vector
/// of frame t; column 0 holds log energy when produced by mfcc().
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  /// Throws InvalidArgumentError unless frames, coeffs >= 1, values has
  /// frames * coeffs entries and every value is finite.
  FeatureMatrix(std::size_t frames, std::size_t coeffs,
                std::vector<double> values, std::string provenance = {});

  /// Builds from nested rows; all rows must have equal, nonzero length.
  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                 std::string provenance = {});

  std::size_t frames() const noexcept { return frames_; }
  std::size_t coeffs() const noexcept { return coeffs_; }
  bool empty() const noexcept { return frames_ == 0; }

  std::span<const double> row(std::size_t t) const noexcept {
    return {values_.data() + t * coeffs_, coeffs_};
  }
  double operator()(std::size_t t, std::size_t c) const noexcept {
    return values_[t * coeffs_ + c];
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    return a.frames_ == b.frames_ && a.coeffs_ == b.coeffs_ &&
           a.values_ == b.values_;
  }

 private:
  std::size_t frames_ = 0;
  std::size_t coeffs_ = 0;
  std::vector<double> values_;
  std::string provenance_;
};

}  // namespace absement
