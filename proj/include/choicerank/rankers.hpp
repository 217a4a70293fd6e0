#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"
#include "choicerank/sampling.hpp"

namespace choicerank {

// Top-K recovery algorithms. All three return item sets through the shared
// top_k_items rule (descending score, ties to the lower index).

// ---------------------------------------------------------------------------
// Borda counting: score every item by the number of times it was chosen.

// counts[i] is the number of observations in which item i+1 won.
std::vector<double> borda_count(const ChoiceDataset& dataset);

std::vector<int> borda_topk(const ChoiceDataset& dataset, int K);

// ---------------------------------------------------------------------------
// Maximum likelihood under the MNL model.
//
// Observations enter aggregated per menu: a block stores the total win
// weight of each menu item. Aggregation makes the likelihood cost
// proportional to the number of distinct menus rather than the number of
// observations, and it also expresses the infinite-data limit directly
// (per-menu weight one, win weights equal to the exact choice
// probabilities).

struct MenuBlock {
  Menu menu;
  std::vector<double> wins;  // aligned with menu.items
  double total = 0.0;        // sum of wins == number of observations of menu
};

struct AggregatedChoiceData {
  int n = 0;
  std::vector<MenuBlock> blocks;
  // appearance[i] is the total observation weight over menus containing
  // item i+1 (N_i in the stationarity contract below).
  std::vector<double> appearance;

  static AggregatedChoiceData from_dataset(const ChoiceDataset& dataset);
  // Exact-probability data: every size-m menu once with unit weight.
  static AggregatedChoiceData from_probs(const ChoiceProbabilitySource& source,
                                         int m);

  // Throws ValidationError if some item never appears or the comparison
  // graph (items connected when they share a menu) is disconnected; the
  // message names a stranded component.
  void check_connected() const;
};

// Log likelihood of partworths U and its gradient:
//   L(U)      = sum_blocks sum_i wins_i * (U_i - logsumexp_{j in menu} U_j)
//   dL/dU_i   = sum_{blocks with i} (wins_i - total * softmax_i(U|menu))
// The gradient entry is exactly the stationarity residual "observed wins
// minus fitted expected wins".
struct LikelihoodValue {
  double value = 0.0;
  std::vector<double> gradient;
};
LikelihoodValue mnl_log_likelihood(const std::vector<double>& partworths,
                                   const AggregatedChoiceData& data);

struct MleOptions {
  double gradient_tolerance = 1e-8;  // on max_i |gradient_i| / max(1, N_i)
  std::int64_t max_iters = 100000;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
};

struct MleResult {
  std::vector<double> u_hat;  // normalised to sum zero
  std::int64_t iterations = 0;
  double residual = 0.0;      // final scaled gradient infinity norm
  double log_likelihood = 0.0;
};

// Gradient ascent with Armijo backtracking. Throws NumericalError carrying
// the final residual if the tolerance is not reached within max_iters.
MleResult mle_fit(const AggregatedChoiceData& data, const MleOptions& options = {});

std::vector<int> mle_topk(const ChoiceDataset& dataset, int K,
                          const MleOptions& options = {});

// ---------------------------------------------------------------------------
// Spectral ranking: a Markov chain hops from the current item to the winner
// of a random menu containing it; items are scored by the stationary
// distribution.

struct SquareMatrix {
  int n = 0;
  std::vector<double> a;  // row major

  explicit SquareMatrix(int size = 0) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct MarkovChainResult {
  SquareMatrix M;
  // True when empirical construction had to fall back to 1/(2 max-degree)
  // damping to keep the diagonal nonnegative.
  bool damped = false;
};

// Exact transition matrix: M_ij = (1/C(n-1,m-1)) sum_{S containing i,j}
// p(j|S) off the diagonal, diagonal fills each row to one.
MarkovChainResult build_markov_chain(const ChoiceProbabilitySource& source,
                                     int m);

// Empirical variant: p(j|S) replaced by observed win fractions; menus never
// observed contribute zero.
MarkovChainResult build_markov_chain_empirical(const ChoiceDataset& dataset);

// Stationary distribution by power iteration from the uniform vector,
// stopping when ||pi M - pi||_1 <= tol. Checks stochasticity and
// irreducibility (errors name an unreachable state) before iterating.
std::vector<double> stationary_distribution(const SquareMatrix& M,
                                            double tol = 1e-12,
                                            std::int64_t max_iters = 1000000);

std::vector<int> spectral_topk(const ChoiceProbabilitySource& source, int m,
                               int K);
std::vector<int> spectral_topk(const ChoiceDataset& dataset, int K);

}  // namespace choicerank
