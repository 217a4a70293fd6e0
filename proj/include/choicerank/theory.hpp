#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"

namespace choicerank {

// ---------------------------------------------------------------------------
// Generalised Borda scores and the quantities the recovery guarantees are
// written in. The score of item i at menu size m is the average probability
// of winning a uniformly random size-m menu containing i:
//   tau_i = (1 / C(n-1,m-1)) * sum_{S of size m, S contains i} p(i|S).
// Scores lie in [0,1] and always sum to n/m.

struct BordaScores {
  std::vector<double> tau;        // tau[i] is the score of item i+1
  int m = 0;
  bool exact = true;
  std::vector<double> std_error;  // Monte Carlo only; empty when exact
  std::int64_t menus_per_item = 0;
  std::int64_t draws_per_menu = 0;

  int n() const { return static_cast<int>(tau.size()); }
};

// Exact scores by full menu enumeration. Refuses C(n,m) > 1e7. Sums are
// accumulated over a fixed partition of the enumeration range and merged
// pairwise, so the result is bit-identical for every thread count.
BordaScores borda_scores_exact(const ChoiceProbabilitySource& source, int m,
                               int threads = 1);

// Monte Carlo scores for parametric models (the only route for noise
// families without closed-form choice probabilities): per item, sample
// menus_per_item uniform menus containing it and draws_per_menu choices
// from each. Standard errors come from the spread of the per-menu win
// rates.
BordaScores borda_scores_mc(const ParametricChoiceModel& model, int m,
                            std::int64_t menus_per_item,
                            std::int64_t draws_per_menu, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Gaps. With tau sorted descending and tau_(r) the r-th largest:
//   Delta_K     = tau_(K) - tau_(K+1)
//   Delta_{K,h} = tau_(K-h) - tau_(K+h+1)     (default convention)
// The alternative convention widens the left index by one; both appear in
// the literature, so the choice is explicit.

enum class GapIndexConvention { KMinusH, KMinusHMinusOne };

struct GapReport {
  int K = 0;
  int m = 0;
  double delta_k = 0.0;
  double factor_one = 0.0;   // 1 / (m * Delta_K)
  double factor_two = 0.0;   // tau_(K+1) / Delta_K
  bool nonpositive_gap = false;
  std::optional<double> delta_kh;  // set when h was supplied
};

GapReport gap_report(const BordaScores& scores, int K,
                     std::optional<int> h = std::nullopt,
                     GapIndexConvention convention = GapIndexConvention::KMinusH);

// Sample-complexity thresholds (expected observations p*R*C(n,m)) above
// which the Borda procedure recovers the top K with high probability:
//   exact:  (8 n ln n / (m Delta_K^2)) * (Delta_K + 2 tau_(K+1))
//   approx: (8 n ln n / (m Delta_{K,h})) * (1 + tau_(K+h+1) / Delta_{K,h})
// Requires the relevant gap to be positive.
double exact_recovery_bound(const BordaScores& scores, int K);
double approx_recovery_bound(const BordaScores& scores, int K, int h,
                             GapIndexConvention convention = GapIndexConvention::KMinusH);

// ---------------------------------------------------------------------------
// Closed-form bracket for the scaled MNL Borda gap m*(tau_i - tau_j),
// evaluated together with the exact enumerated value. The closed forms are
// scale-sensitive, so each side is computed at the normalisation its
// derivation assumes: the upper bound with weights scaled so the minimum
// weight is 1, the lower bound with the weights of the n-2 other items
// scaled to mean 1.

struct SandwichBounds {
  double lower = 0.0;
  double exact = 0.0;
  double upper = 0.0;
};

SandwichBounds mnl_gap_sandwich(const std::vector<double>& weights, int i,
                                int j, int m);

// ---------------------------------------------------------------------------
// KL divergence between the observation distributions of two planted
// instances M^a and M^b (weight v+delta on {1..K-1, a} resp. {1..K-1, b},
// weight v elsewhere), under the full sampling model with offer
// probability p and R rounds. Returns the closed form
//   p * R * ln((v+delta)/v) * C(n-1,m-1) * Delta_K(M^a)
// alongside the brute-force menu-by-menu sum; the two agree to floating
// point accuracy, which the verification suite checks.
struct KlPair {
  double compact = 0.0;
  double brute_force = 0.0;
};

KlPair kl_special_pair(int n, int m, int K, double v, double delta, double p,
                       int R, int a, int b);

// ---------------------------------------------------------------------------
// Borda consistency: for IID random-utility models the generalised Borda
// score orders items exactly as the partworths do. The checker compares an
// estimated or exact score vector with a declared partworth order; pairs
// whose score difference is within 4 pooled standard errors are skipped
// rather than adjudicated (Monte Carlo mode only).

struct ConsistencyReport {
  bool consistent = true;
  std::vector<std::pair<int, int>> violations;  // (higher-U item, lower-U item)
  int adjudicated = 0;
  int skipped = 0;
};

ConsistencyReport check_borda_consistency(const BordaScores& scores,
                                          const std::vector<double>& partworths);

}  // namespace choicerank
