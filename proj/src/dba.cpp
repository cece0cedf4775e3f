#include "absement/dba.hpp"

#include <random>
#include <string>
#include <vector>

#include "absement/dtw.hpp"
#include "absement/error.hpp"
#include "parallel.hpp"

namespace absement {
namespace {

void check_set(const FeatureMatrix& current, std::span<const FeatureMatrix> inputs) {
  if (inputs.empty()) throw InvalidArgumentError("barycenter averaging needs at least one input");
  if (current.empty()) throw InvalidArgumentError("empty initial average");
  for (const auto& s : inputs) {
    if (s.coeffs() != current.coeffs()) {
      throw InvalidArgumentError("coefficient count mismatch among averaging inputs");
    }
  }
}

}  // namespace

void DbaConfig::validate(std::size_t n_inputs) const {
  if (max_iterations < 1) throw InvalidArgumentError("max_iterations must be at least 1");
  if (!(rel_tolerance >= 0.0)) throw InvalidArgumentError("rel_tolerance must be nonnegative");
  if (n_inputs == 0) throw InvalidArgumentError("barycenter averaging needs at least one input");
  if (const auto* idx = std::get_if<std::size_t>(&init_choice); idx && *idx >= n_inputs) {
    throw InvalidArgumentError("init index " + std::to_string(*idx) +
                               " out of range for " + std::to_string(n_inputs) + " inputs");
  }
}

std::size_t resolve_init(const DbaConfig& cfg, std::size_t n_inputs) {
  cfg.validate(n_inputs);
  if (const auto* idx = std::get_if<std::size_t>(&cfg.init_choice)) return *idx;
  std::mt19937_64 rng(std::get<RandomInit>(cfg.init_choice).seed);
  return static_cast<std::size_t>(rng() % n_inputs);
}

double dba_objective(const FeatureMatrix& average, std::span<const FeatureMatrix> inputs,
                     std::size_t threads) {
  check_set(average, inputs);
  std::vector<double> costs(inputs.size());
  detail::parallel_for(inputs.size(), threads,
                       [&](std::size_t s) { costs[s] = dtw_cost(average, inputs[s]); });
  double total = 0.0;
  for (double c : costs) total += c;
  return total;
}

DbaStep dba_iteration(const FeatureMatrix& current, std::span<const FeatureMatrix> inputs,
                      std::size_t threads) {
  check_set(current, inputs);
  std::vector<AbsementResult> alignments(inputs.size());
  detail::parallel_for(inputs.size(), threads, [&](std::size_t s) {
    alignments[s] = dtw_absement(current, inputs[s]);
  });

  const std::size_t n = current.frames(), k = current.coeffs();
  std::vector<double> sums(n * k, 0.0);
  std::vector<std::size_t> counts(n, 0);
  double objective = 0.0;
  // Fixed reduction order: inputs in order, path steps in order.
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    objective += alignments[s].cost;
    for (const auto& step : alignments[s].path) {
      const auto frame = inputs[s].row(step.j - 1);
      double* acc = sums.data() + (step.i - 1) * k;
      for (std::size_t c = 0; c < k; ++c) acc[c] += frame[c];
      ++counts[step.i - 1];
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    const auto cnt = static_cast<double>(counts[t]);
    for (std::size_t c = 0; c < k; ++c) sums[t * k + c] /= cnt;
  }
  return {FeatureMatrix(n, k, std::move(sums), current.provenance()), objective};
}

DbaOutcome dba_average(std::span<const FeatureMatrix> inputs, const DbaConfig& cfg) {
  const std::size_t init = resolve_init(cfg, inputs.size());
  DbaOutcome out;
  out.init_index = init;
  out.average = inputs[init];
  out.average.set_provenance("average");

  double objective = dba_objective(out.average, inputs, cfg.threads);
  out.objective_trace.push_back(objective);

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    FeatureMatrix candidate = dba_iteration(out.average, inputs, cfg.threads).average;
    const double next = dba_objective(candidate, inputs, cfg.threads);
    ++out.iterations_run;
    if (next > objective) break;
    out.average = std::move(candidate);
    out.objective_trace.push_back(next);
    const double previous = objective;
    objective = next;
    if (previous - next <= cfg.rel_tolerance * previous) break;
  }
  return out;
}

}  // namespace absement
