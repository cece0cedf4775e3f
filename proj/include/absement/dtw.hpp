#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "absement/feature_matrix.hpp"

namespace absement {

/// One cell of a warping path, 1-based: `i` indexes the query, `j` the
/// template.
struct WarpStep {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const WarpStep&, const WarpStep&) = default;
};

using WarpPath = std::vector<WarpStep>;

struct AbsementResult {
  double cost = 0.0;         ///< summed frame distance along the path
  WarpPath path;
  double scaled_cost = 0.0;  ///< cost / sqrt(template_len)
  std::size_t query_len = 0;
  std::size_t template_len = 0;
};

struct DistanceProfile {
  std::vector<double> per_frame;
};

enum class Reference { kQuery, kTemplate };

/// Alignment options. Only unconstrained alignment is implemented; setting
/// `radius` makes every alignment call throw UnsupportedFormatError.
struct DtwOptions {
  std::optional<std::size_t> radius;
};

/// Euclidean distance. Throws InvalidArgumentError on length mismatch or
/// empty input.
double euclidean_distance(std::span<const double> x, std::span<const double> y);

/// Full DTW with steps (1,0), (0,1), (1,1) at unit weight and one optimal path.
/// On ties the backtrace prefers the diagonal, then (0,1), then (1,0).
AbsementResult dtw_absement(const FeatureMatrix& query,
                            const FeatureMatrix& templ,
                            const DtwOptions& opts = {});

/// Same cost as dtw_absement(...).cost, computed with two rolling rows sized
/// by the shorter sequence. Bit-identical to the full computation.
double dtw_cost(const FeatureMatrix& query, const FeatureMatrix& templ,
                const DtwOptions& opts = {});

/// cost / sqrt(template_len). Throws InvalidArgumentError for a zero length or
/// a negative / non-finite cost.
double scaled_absement(double cost, std::size_t template_len);

/// d(x_i, y_j) for every step of `path`.
std::vector<double> path_step_distances(const FeatureMatrix& query,
                                        const FeatureMatrix& templ,
                                        const WarpPath& path);

/// Sum of step distances grouped by the frame index of the reference sequence.
DistanceProfile distance_profile(const FeatureMatrix& query,
                                 const FeatureMatrix& templ,
                                 Reference reference,
                                 const DtwOptions& opts = {});

/// Same, reusing an already computed alignment.
DistanceProfile distance_profile(const FeatureMatrix& query,
                                 const FeatureMatrix& templ,
                                 const AbsementResult& alignment,
                                 Reference reference);

}  // namespace absement
