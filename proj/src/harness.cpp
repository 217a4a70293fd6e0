#include "choicerank/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace choicerank {

int edit_distance_topk(const std::vector<int>& estimate,
                       const std::vector<int>& truth) {
  if (estimate.size() != truth.size())
    throw ValidationError("top-K sets have different sizes " +
                          std::to_string(estimate.size()) + " and " +
                          std::to_string(truth.size()));
  std::vector<int> a = estimate;
  std::vector<int> b = truth;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (std::adjacent_find(a.begin(), a.end()) != a.end() ||
      std::adjacent_find(b.begin(), b.end()) != b.end())
    throw ValidationError("top-K sets must not repeat items");
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<int>(a.size() - common.size());
}

double exact_topk_accuracy(int successes, int trials) {
  if (trials < 1)
    throw ValidationError("accuracy needs a positive trial count");
  if (successes < 0 || successes > trials)
    throw ValidationError("successes must lie in [0, trials]");
  return static_cast<double>(successes) / static_cast<double>(trials);
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "borda") return Algorithm::Borda;
  if (name == "mle") return Algorithm::Mle;
  if (name == "spectral") return Algorithm::Spectral;
  throw ValidationError("unknown algorithm '" + name +
                        "' (expected borda, mle or spectral)");
}

std::string algorithm_to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Borda: return "borda";
    case Algorithm::Mle: return "mle";
    case Algorithm::Spectral: return "spectral";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ValidationError("experiment needs n >= 2");
  if (m_list.empty()) throw ValidationError("experiment needs at least one m");
  for (int m : m_list)
    if (m < 2 || m > n)
      throw ValidationError("menu size " + std::to_string(m) +
                            " must satisfy 2 <= m <= n");
  if (k_list.empty()) throw ValidationError("experiment needs at least one K");
  for (int K : k_list)
    if (K < 1 || K > n)
      throw ValidationError("K = " + std::to_string(K) +
                            " must lie in [1, n]");
  if (budgets.empty())
    throw ValidationError("experiment needs at least one sample budget");
  for (double b : budgets)
    if (!(b > 0.0))
      throw ValidationError("sample budgets must be positive");
  if (trials < 1) throw ValidationError("trials must be positive");
  if (R < 1) throw ValidationError("R must be positive");
  if (algorithms.empty())
    throw ValidationError("experiment needs at least one algorithm");
}

namespace {

struct Cell {
  int successes = 0;
  std::vector<double> times;
};

// One trial of every (algorithm, K, budget) combination for a fixed m.
// draw_datasets yields the nested datasets for the given trial seed.
template <typename Simulate>
void run_trial(const Simulate& simulate, std::uint64_t trial_seed,
               const std::vector<double>& p_values,
               const ExperimentConfig& config,
               const std::vector<std::vector<int>>& truth_sets,
               std::vector<std::vector<std::vector<Cell>>>& cells) {
  std::vector<ChoiceDataset> datasets = simulate(trial_seed, p_values);
  for (std::size_t level = 0; level < datasets.size(); ++level) {
    const ChoiceDataset& data = datasets[level];
    for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
      for (std::size_t ki = 0; ki < config.k_list.size(); ++ki) {
        int K = config.k_list[ki];
        Cell& cell = cells[ai][ki][level];
        auto started = std::chrono::steady_clock::now();
        bool success = false;
        try {
          if (data.observations.empty())
            throw ValidationError("no observations at this budget");
          std::vector<int> estimate;
          switch (config.algorithms[ai]) {
            case Algorithm::Borda:
              estimate = borda_topk(data, K);
              break;
            case Algorithm::Mle:
              estimate = mle_topk(data, K);
              break;
            case Algorithm::Spectral:
              estimate = spectral_topk(data, K);
              break;
          }
          success = edit_distance_topk(estimate, truth_sets[ki]) == 0;
        } catch (const ValidationError&) {
          // The algorithm could not produce a ranking at this budget
          // (empty data, disconnected graph, uncovered pairs): recovery
          // failed for this trial.
        } catch (const NumericalError&) {
        }
        if (config.timing) {
          std::chrono::duration<double> elapsed =
              std::chrono::steady_clock::now() - started;
          cell.times.push_back(elapsed.count());
        }
        if (success) ++cell.successes;
      }
    }
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

template <typename MakeSimulate>
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::vector<double>& truth_scores,
                                      const MakeSimulate& make_simulate) {
  config.validate();
  std::vector<std::vector<int>> truth_sets;
  truth_sets.reserve(config.k_list.size());
  for (int K : config.k_list)
    truth_sets.push_back(top_k_items(truth_scores, K));

  std::vector<ResultRow> rows;
  for (int m : config.m_list) {
    double menus = binom_real(config.n, m);
    std::vector<double> p_values;
    p_values.reserve(config.budgets.size());
    for (double budget : config.budgets) {
      double p = budget / (config.R * menus);
      if (p > 1.0)
        throw ValidationError(
            "budget " + format_double_exact(budget) + " is infeasible at m = " +
            std::to_string(m) + ": the maximum expected sample count is R*C(n,m) = " +
            format_double_exact(config.R * menus));
      p_values.push_back(p);
    }

    auto simulate = make_simulate(m);

    // cells[algorithm][K][budget]
    std::vector<std::vector<std::vector<Cell>>> cells(
        config.algorithms.size(),
        std::vector<std::vector<Cell>>(
            config.k_list.size(), std::vector<Cell>(config.budgets.size())));

    if (config.threads > 1 && !config.timing) {
      // Trials are independent given their derived seeds; merge per-trial
      // cell grids in trial order so the totals match the sequential run.
      std::vector<std::vector<std::vector<std::vector<Cell>>>> per_trial(
          config.trials);
      parallel_for_chunks(config.trials, config.threads, [&](int t) {
        auto grid = cells;  // zero-initialised copy of the right shape
        run_trial(simulate,
                  mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(m)),
                           static_cast<std::uint64_t>(t)),
                  p_values, config, truth_sets, grid);
        per_trial[t] = std::move(grid);
      });
      for (int t = 0; t < config.trials; ++t)
        for (std::size_t ai = 0; ai < cells.size(); ++ai)
          for (std::size_t ki = 0; ki < cells[ai].size(); ++ki)
            for (std::size_t level = 0; level < cells[ai][ki].size(); ++level)
              cells[ai][ki][level].successes +=
                  per_trial[t][ai][ki][level].successes;
    } else {
      for (int t = 0; t < config.trials; ++t)
        run_trial(simulate,
                  mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(m)),
                           static_cast<std::uint64_t>(t)),
                  p_values, config, truth_sets, cells);
    }

    for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai)
      for (std::size_t ki = 0; ki < config.k_list.size(); ++ki)
        for (std::size_t level = 0; level < config.budgets.size(); ++level) {
          const Cell& cell = cells[ai][ki][level];
          ResultRow row;
          row.algorithm = algorithm_to_string(config.algorithms[ai]);
          row.n = config.n;
          row.m = m;
          row.K = config.k_list[ki];
          row.expected_samples = config.budgets[level];
          row.trials = config.trials;
          row.successes = cell.successes;
          row.accuracy = exact_topk_accuracy(cell.successes, config.trials);
          row.median_time_s = median(cell.times);
          rows.push_back(std::move(row));
        }
  }

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.algorithm, a.m, a.K, a.expected_samples) <
           std::tie(b.algorithm, b.m, b.K, b.expected_samples);
  });
  return rows;
}

}  // namespace

std::vector<ResultRow> run_synthetic(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> partworths;
  if (config.partworths) {
    partworths = *config.partworths;
    if (static_cast<int>(partworths.size()) != config.n)
      throw ValidationError("expected " + std::to_string(config.n) +
                            " partworths, got " +
                            std::to_string(partworths.size()));
  } else if (config.partworth_seed) {
    Rng rng(*config.partworth_seed);
    partworths.resize(config.n);
    for (double& u : partworths) u = rng.normal();
  } else {
    throw ValidationError(
        "synthetic experiment needs partworths or a partworth seed");
  }

  ParametricChoiceModel model;
  model.partworths = PartworthVector::of(partworths);
  model.noise = config.noise;

  auto make_simulate = [&](int m) {
    return [&, m](std::uint64_t trial_seed, const std::vector<double>& p_values) {
      SamplingConfig sc;
      sc.n = config.n;
      sc.m = m;
      sc.R = config.R;
      sc.seed = trial_seed;
      sc.p = *std::max_element(p_values.begin(), p_values.end());
      return simulate_nested_datasets(model, sc,
                                      std::span<const double>(p_values));
    };
  };
  return run_experiment(config, partworths, make_simulate);
}

std::vector<ResultRow> run_real(const TabularChoiceModel& model,
                                const std::vector<int>& truth_order,
                                const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.n = model.n();
  cfg.validate();
  if (static_cast<int>(truth_order.size()) != model.n())
    throw ValidationError("truth ordering has " +
                          std::to_string(truth_order.size()) +
                          " entries, model has " + std::to_string(model.n()));

  // Positional scores turn the ordering into something top_k_items can
  // consume; the best item gets the largest score.
  std::vector<double> truth_scores(model.n(), 0.0);
  std::vector<char> seen(model.n() + 1, 0);
  for (std::size_t r = 0; r < truth_order.size(); ++r) {
    int item = truth_order[r];
    if (item < 1 || item > model.n() || seen[item])
      throw ValidationError("truth ordering is not a permutation of 1.." +
                            std::to_string(model.n()));
    seen[item] = 1;
    truth_scores[item - 1] = static_cast<double>(truth_order.size() - r);
  }

  auto make_simulate = [&](int m) {
    return [&, m](std::uint64_t trial_seed, const std::vector<double>& p_values) {
      SamplingConfig sc;
      sc.n = cfg.n;
      sc.m = m;
      sc.R = cfg.R;
      sc.seed = trial_seed;
      sc.p = *std::max_element(p_values.begin(), p_values.end());
      return simulate_nested_datasets(model, sc,
                                      std::span<const double>(p_values));
    };
  };
  return run_experiment(cfg, truth_scores, make_simulate);
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "algorithm,n,m,K,expected_samples,trials,successes,accuracy,median_time_s\n";
  char buf[64];
  for (const auto& row : rows) {
    out << row.algorithm << ',' << row.n << ',' << row.m << ',' << row.K << ','
        << format_double_exact(row.expected_samples) << ',' << row.trials
        << ',' << row.successes << ',' << format_double_exact(row.accuracy)
        << ',';
    std::snprintf(buf, sizeof buf, "%.9f", row.median_time_s);
    out << buf << '\n';
  }
}

std::vector<TimingRow> time_algorithms(const ChoiceDataset& dataset,
                                       const std::vector<Algorithm>& algorithms,
                                       int K, int runs) {
  if (runs < 5)
    throw ValidationError("timing needs at least 5 runs for a stable median");
  std::vector<TimingRow> rows;
  for (Algorithm algorithm : algorithms) {
    std::vector<double> times;
    times.reserve(runs);
    for (int r = 0; r < runs; ++r) {
      auto started = std::chrono::steady_clock::now();
      switch (algorithm) {
        case Algorithm::Borda:
          borda_topk(dataset, K);
          break;
        case Algorithm::Mle:
          mle_topk(dataset, K);
          break;
        case Algorithm::Spectral:
          spectral_topk(dataset, K);
          break;
      }
      std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - started;
      times.push_back(elapsed.count());
    }
    TimingRow row;
    row.algorithm = algorithm_to_string(algorithm);
    row.runs = runs;
    row.median_time_s = median(times);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace choicerank
