#include "absement/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "absement/error.hpp"

namespace absement {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const FeatureMatrix& x, const FeatureMatrix& y,
                  const DtwOptions& opts) {
  if (opts.radius) {
    throw UnsupportedFormatError("warping radius is not supported; alignment is unconstrained");
  }
  if (x.empty() || y.empty()) throw InvalidArgumentError("cannot align an empty sequence");
  if (x.coeffs() != y.coeffs()) {
    throw InvalidArgumentError("coefficient count mismatch: " +
                               std::to_string(x.coeffs()) + " vs " +
                               std::to_string(y.coeffs()));
  }
}

// Unchecked distance for the inner loops.
double frame_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

// Accumulated cost matrix with a border row/column of +inf, (T_x+1) x (T_y+1).
std::vector<double> accumulate(const FeatureMatrix& x, const FeatureMatrix& y) {
  const std::size_t n = x.frames(), m = y.frames();
  const std::size_t stride = m + 1;
  std::vector<double> acc((n + 1) * stride, kInf);
  acc[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto xi = x.row(i - 1);
    double* cur = acc.data() + i * stride;
    const double* prev = cur - stride;
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min(prev[j - 1], std::min(prev[j], cur[j - 1]));
      cur[j] = best + frame_distance(xi, y.row(j - 1));
    }
  }
  return acc;
}

}  // namespace

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidArgumentError("vector length mismatch: " + std::to_string(x.size()) +
                               " vs " + std::to_string(y.size()));
  }
  if (x.empty()) throw InvalidArgumentError("distance of empty vectors");
  return frame_distance(x, y);
}

double scaled_absement(double cost, std::size_t template_len) {
  if (template_len == 0) throw InvalidArgumentError("template length must be positive");
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw InvalidArgumentError("absement must be finite and nonnegative");
  }
  return cost / std::sqrt(static_cast<double>(template_len));
}

AbsementResult dtw_absement(const FeatureMatrix& query, const FeatureMatrix& templ,
                            const DtwOptions& opts) {
  check_inputs(query, templ, opts);
  const std::size_t n = query.frames(), m = templ.frames();
  const std::size_t stride = m + 1;
  const std::vector<double> acc = accumulate(query, templ);
  auto at = [&](std::size_t i, std::size_t j) { return acc[i * stride + j]; };

  AbsementResult r;
  r.query_len = n;
  r.template_len = m;
  r.cost = at(n, m);
  r.scaled_cost = scaled_absement(r.cost, m);

  std::size_t i = n, j = m;
  r.path.reserve(n + m);
  r.path.push_back({i, j});
  while (i > 1 || j > 1) {
    // Predecessor preference on ties: diagonal, then (0,1), then (1,0).
    std::size_t bi = i - 1, bj = j - 1;
    double best = at(i - 1, j - 1);
    if (at(i, j - 1) < best) {
      best = at(i, j - 1);
      bi = i;
      bj = j - 1;
    }
    if (at(i - 1, j) < best) {
      bi = i - 1;
      bj = j;
    }
    i = bi;
    j = bj;
    r.path.push_back({i, j});
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

double dtw_cost(const FeatureMatrix& query, const FeatureMatrix& templ,
                const DtwOptions& opts) {
  check_inputs(query, templ, opts);
  // Rows run along the shorter sequence. Each cell depends only on its three
  // neighbours, so the transposed recursion yields bit-identical values.
  const bool transpose = templ.frames() > query.frames();
  const FeatureMatrix& outer = transpose ? templ : query;
  const FeatureMatrix& inner = transpose ? query : templ;
  const std::size_t n = outer.frames(), m = inner.frames();

  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto oi = outer.row(i - 1);
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double best = std::min(prev[j - 1], std::min(prev[j], cur[j - 1]));
      cur[j] = best + frame_distance(oi, inner.row(j - 1));
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<double> path_step_distances(const FeatureMatrix& query,
                                        const FeatureMatrix& templ,
                                        const WarpPath& path) {
  std::vector<double> d;
  d.reserve(path.size());
  for (const auto& s : path) {
    if (s.i == 0 || s.j == 0 || s.i > query.frames() || s.j > templ.frames()) {
      throw InvalidArgumentError("warp step outside the sequences");
    }
    d.push_back(euclidean_distance(query.row(s.i - 1), templ.row(s.j - 1)));
  }
  return d;
}

DistanceProfile distance_profile(const FeatureMatrix& query,
                                 const FeatureMatrix& templ,
                                 const AbsementResult& alignment,
                                 Reference reference) {
  const bool by_query = reference == Reference::kQuery;
  DistanceProfile p;
  p.per_frame.assign(by_query ? query.frames() : templ.frames(), 0.0);
  const auto dists = path_step_distances(query, templ, alignment.path);
  for (std::size_t s = 0; s < alignment.path.size(); ++s) {
    const auto& step = alignment.path[s];
    p.per_frame[(by_query ? step.i : step.j) - 1] += dists[s];
  }
  return p;
}

DistanceProfile distance_profile(const FeatureMatrix& query,
                                 const FeatureMatrix& templ,
                                 Reference reference, const DtwOptions& opts) {
  return distance_profile(query, templ, dtw_absement(query, templ, opts), reference);
}

}  // namespace absement
