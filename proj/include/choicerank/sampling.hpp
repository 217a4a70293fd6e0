#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"

namespace choicerank {

// ---------------------------------------------------------------------------
// The sampling model: over R rounds, every size-m menu is offered
// independently with probability p each round, and each offered menu
// produces one choice. The expected number of observations is
// p * R * C(n,m).

struct SamplingConfig {
  int n = 0;
  int m = 0;
  double p = 1.0;
  int R = 1;
  std::uint64_t seed = 0;
  // Lifts the guard against configurations whose candidate trial count
  // R * C(n,m) exceeds 1e9.
  bool allow_large = false;

  void validate() const;
};

struct Observation {
  int round = 0;  // 1-based
  Menu menu;
  int chosen = 0;
};

struct ChoiceDataset {
  int n = 0;
  std::vector<Observation> observations;

  std::int64_t size() const {
    return static_cast<std::int64_t>(observations.size());
  }
  // Common menu size; throws if the dataset mixes sizes (unsupported).
  int menu_size() const;
  void validate() const;
};

// Expected observation count p * R * C(n,m) for a configuration.
double expected_sample_size(const SamplingConfig& config);

// Simulates one dataset. Observations come out in (round, lexicographic
// menu) order. Every (round, menu) pair draws from its own derived random
// stream, which buys two properties:
//   * rounds can be simulated in parallel with output identical to the
//     sequential run, and
//   * datasets are coupled across offer probabilities: lowering p yields an
//     exact subset of the observations drawn at a higher p (same seed),
//     which is how the experiment harness realises nested sample budgets.
ChoiceDataset simulate_dataset(const ParametricChoiceModel& model,
                               const SamplingConfig& config, int threads = 1);
ChoiceDataset simulate_dataset(const TabularChoiceModel& model,
                               const SamplingConfig& config, int threads = 1);

// Simulates once and materialises the dataset at each offer probability in
// p_values (each in (0,1]); config.p is ignored. Returned datasets are
// nested: the dataset for a smaller p is a subset of that for a larger p.
std::vector<ChoiceDataset> simulate_nested_datasets(
    const ParametricChoiceModel& model, const SamplingConfig& config,
    std::span<const double> p_values, int threads = 1);
std::vector<ChoiceDataset> simulate_nested_datasets(
    const TabularChoiceModel& model, const SamplingConfig& config,
    std::span<const double> p_values, int threads = 1);

// Plain-text dataset serialisation, one observation per line:
//   r;m;i1,...,im;y
// A ".gz" suffix on the path switches to gzip transparently in both
// directions.
void save_dataset(const ChoiceDataset& dataset, const std::string& path);
ChoiceDataset load_dataset(const std::string& path);

}  // namespace choicerank
