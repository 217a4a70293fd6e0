#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"
#include "choicerank/rankers.hpp"
#include "choicerank/sampling.hpp"

namespace choicerank {

// ---------------------------------------------------------------------------
// Evaluation harness: repeated top-K recovery trials over a grid of sample
// budgets, reported as exact-recovery accuracy.

// Set difference distance between two size-K item sets: K minus the overlap.
// Zero iff the sets are equal.
int edit_distance_topk(const std::vector<int>& estimate,
                       const std::vector<int>& truth);

double exact_topk_accuracy(int successes, int trials);

enum class Algorithm { Borda, Mle, Spectral };

Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_to_string(Algorithm algorithm);

struct ExperimentConfig {
  int n = 0;
  std::vector<int> m_list;
  std::vector<int> k_list;
  // Target expected observation counts p * R * C(n,m); p is solved per m.
  std::vector<double> budgets;
  int trials = 100;
  int R = 100;
  std::uint64_t seed = 0;
  std::vector<Algorithm> algorithms{Algorithm::Borda, Algorithm::Mle,
                                    Algorithm::Spectral};
  // Wall-clock timing is off by default so identical runs produce identical
  // CSV bytes; switch on to fill median_time_s with real measurements.
  bool timing = false;
  int threads = 1;

  // Synthetic mode: either explicit partworths or a generator seed for
  // i.i.d. standard normal partworths.
  std::optional<std::vector<double>> partworths;
  std::optional<std::uint64_t> partworth_seed;
  NoiseFamily noise = NoiseFamily::GumbelStandard;

  void validate() const;
};

struct ResultRow {
  std::string algorithm;
  int n = 0;
  int m = 0;
  int K = 0;
  double expected_samples = 0.0;
  int trials = 0;
  int successes = 0;
  double accuracy = 0.0;
  double median_time_s = 0.0;
};

// Synthetic pipeline: draw or take partworths, read the true top-K off
// them, then for each trial simulate one dataset at the largest budget and
// evaluate every algorithm on the nested sub-datasets for the smaller
// budgets. A trial where an algorithm cannot run at all (disconnected
// comparison graph at a tiny budget, say) counts as a recovery failure for
// that algorithm rather than aborting the experiment.
std::vector<ResultRow> run_synthetic(const ExperimentConfig& config);

// Same protocol with choices drawn from a fixed tabular model and the true
// top-K taken from a supplied full ordering (best first).
std::vector<ResultRow> run_real(const TabularChoiceModel& model,
                                const std::vector<int>& truth_order,
                                const ExperimentConfig& config);

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);

// Median wall time of repeated runs of each algorithm on one in-memory
// dataset (timing excludes I/O and data generation by construction). Runs
// are sequential; at least 5 repetitions are required for a stable median.
struct TimingRow {
  std::string algorithm;
  int runs = 0;
  double median_time_s = 0.0;
};

std::vector<TimingRow> time_algorithms(const ChoiceDataset& dataset,
                                       const std::vector<Algorithm>& algorithms,
                                       int K, int runs = 5);

}  // namespace choicerank
