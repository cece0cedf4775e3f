#include "absement/feature_matrix.hpp"

#include <cmath>
#include <string>

#include "absement/error.hpp"

namespace absement {

FeatureMatrix::FeatureMatrix(std::size_t frames, std::size_t coeffs,
                             std::vector<double> values, std::string provenance)
    : frames_(frames),
      coeffs_(coeffs),
      values_(std::move(values)),
      provenance_(std::move(provenance)) {
  if (frames_ == 0 || coeffs_ == 0) {
    throw InvalidArgumentError("feature matrix needs at least one frame and one coefficient");
  }
  if (values_.size() != frames_ * coeffs_) {
    throw InvalidArgumentError("feature matrix expects " +
                               std::to_string(frames_ * coeffs_) +
                               " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw InvalidArgumentError("feature matrix contains a non-finite value");
    }
  }
}

FeatureMatrix FeatureMatrix::from_rows(
    const std::vector<std::vector<double>>& rows, std::string provenance) {
  if (rows.empty()) throw InvalidArgumentError("feature matrix has no frames");
  const std::size_t k = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * k);
  for (const auto& r : rows) {
    if (r.size() != k) throw InvalidArgumentError("ragged feature rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return FeatureMatrix(rows.size(), k, std::move(values), std::move(provenance));
}

}  // namespace absement
