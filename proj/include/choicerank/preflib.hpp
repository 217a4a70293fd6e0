#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"

namespace choicerank {

// ---------------------------------------------------------------------------
// PrefLib-style ranking data: a header declaring the number of alternatives
// (and optionally their names), then one line per distinct ranking,
//   multiplicity: a,b,{c,d},e
// where braces group tied tiers. Rankings that stop early are completed
// with one bottom tier holding every unranked item, so each stored record
// tiers all n items.

struct RankingRecord {
  std::vector<std::vector<int>> tiers;  // each tier sorted ascending
  std::int64_t multiplicity = 1;
};

struct RankingDataset {
  int n = 0;
  std::vector<std::string> names;  // item i is names[i-1]; may be empty
  std::vector<RankingRecord> records;
  std::int64_t total_rankings = 0;  // sum of multiplicities

  void validate() const;
};

// Parser for the format above. Metadata lines start with '#'; the
// '# NUMBER ALTERNATIVES:' line is required before the first data line and
// '# ALTERNATIVE NAME i:' lines are honoured. Errors carry line numbers.
RankingDataset parse_rankings(const std::string& path);

// Canonical serialisation (round-trips byte-identically through
// parse_rankings).
void save_rankings(const RankingDataset& dataset, const std::string& path);

// Converts rankings to exact choice probabilities over all size-m menus: a
// ranking picks from a menu the member ranked highest, and an l-way tie at
// the top of the menu contributes a 1/l win to each tied member. The win
// masses are accumulated in integer units of 1/lcm(1..m), so the stored
// probabilities are exact ratios rounded to double only once.
TabularChoiceModel empirical_choice_probs(const RankingDataset& dataset, int m);

// Ground-truth ordering by pairwise majority. Fails with a named violating
// triple (or tied pair) when the majority relation is not a strict total
// order, i.e. when weak stochastic transitivity does not hold. The pairwise
// matrix is returned as a certificate: pairwise[i][j] is the fraction of
// rankings preferring item i+1 over item j+1 (ties split evenly).
struct GroundTruth {
  std::vector<int> order;  // best first
  std::vector<std::vector<double>> pairwise;
};

GroundTruth ground_truth_ordering(const RankingDataset& dataset);

// rank,item CSV for ground-truth orderings.
void save_ordering(const std::vector<int>& order, const std::string& path);
std::vector<int> load_ordering(const std::string& path);

}  // namespace choicerank
