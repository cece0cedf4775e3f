#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "absement/feature_matrix.hpp"

namespace absement {

/// Pick the initial average uniformly at random with this seed.
struct RandomInit {
  std::uint64_t seed = 0;
};

struct DbaConfig {
  std::size_t max_iterations = 10;
  double rel_tolerance = 1e-6;
  /// Index into the inputs, or a seeded random pick.
  std::variant<std::size_t, RandomInit> init_choice = std::size_t{0};
  /// Worker threads for per-input alignment; 0 picks hardware concurrency.
  std::size_t threads = 1;

  void validate(std::size_t n_inputs) const;
};

struct DbaStep {
  FeatureMatrix average;
  double objective = 0.0;  ///< sum of DTW costs of the *input* average
};

struct DbaOutcome {
  FeatureMatrix average;
  /// trace[0] is the objective of the initial sequence, trace[n] the objective
  /// after the n-th accepted update. Never increases.
  std::vector<double> objective_trace;
  std::size_t iterations_run = 0;
  std::size_t init_index = 0;
};

/// Sum of DTW costs from `average` to each input.
double dba_objective(const FeatureMatrix& average,
                     std::span<const FeatureMatrix> inputs,
                     std::size_t threads = 1);

/// One barycenter update: align every input to `current`, then replace each
/// frame of `current` by the mean of all input frames aligned to it.
DbaStep dba_iteration(const FeatureMatrix& current,
                      std::span<const FeatureMatrix> inputs,
                      std::size_t threads = 1);

/// Iterates dba_iteration from the chosen initial input until the relative
/// objective decrease drops below rel_tolerance or max_iterations updates were
/// attempted. An update that would increase the objective is discarded and
/// ends the iteration.
DbaOutcome dba_average(std::span<const FeatureMatrix> inputs,
                       const DbaConfig& cfg = {});

/// Resolves cfg.init_choice to an input index.
std::size_t resolve_init(const DbaConfig& cfg, std::size_t n_inputs);

}  // namespace absement
