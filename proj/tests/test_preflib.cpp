#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "choicerank/preflib.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace choicerank;

namespace {

std::string write_file(const std::string& stem, const std::string& body) {
  std::string path = "/tmp/choicerank_test_pref_" + stem + ".txt";
  std::ofstream out(path);
  REQUIRE(out.good());
  out << body;
  out.close();
  return path;
}

// n = 4 hand corpus used throughout: 6 rankings in 3 records.
//   3x  1 > 2 > 3 > 4
//   2x  2 > {1,3}        (completed with bottom tier {4})
//   1x  {1,2} > 4 > 3
const char* kCorpus =
    "# NUMBER ALTERNATIVES: 4\n"
    "# ALTERNATIVE NAME 1: alpha\n"
    "# ALTERNATIVE NAME 2: beta\n"
    "# ALTERNATIVE NAME 3: gamma\n"
    "# ALTERNATIVE NAME 4: delta\n"
    "3: 1,2,3,4\n"
    "2: 2,{1,3}\n"
    "1: {1,2},4,3\n";

}  // namespace

TEST_CASE("parse_rankings reads tiers, ties, names and completes short ballots") {
  std::string path = write_file("corpus", kCorpus);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());

  CHECK(ds.n == 4);
  CHECK(ds.total_rankings == 6);
  REQUIRE(ds.names.size() == 4);
  CHECK(ds.names[0] == "alpha");
  CHECK(ds.names[3] == "delta");
  REQUIRE(ds.records.size() == 3);

  CHECK(ds.records[0].multiplicity == 3);
  CHECK(ds.records[0].tiers ==
        std::vector<std::vector<int>>{{1}, {2}, {3}, {4}});

  // the truncated ballot gains one bottom tier with the unranked item
  CHECK(ds.records[1].multiplicity == 2);
  CHECK(ds.records[1].tiers == std::vector<std::vector<int>>{{2}, {1, 3}, {4}});

  CHECK(ds.records[2].multiplicity == 1);
  CHECK(ds.records[2].tiers == std::vector<std::vector<int>>{{1, 2}, {4}, {3}});

  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("parse_rankings reports malformed input with line numbers") {
  auto expect_fail = [](const std::string& stem, const std::string& body,
                        const std::string& needle) {
    std::string path = write_file(stem, body);
    CHECK_THROWS_WITH_AS(parse_rankings(path), doctest::Contains(needle.c_str()),
                         ValidationError);
    std::remove(path.c_str());
  };

  CHECK_THROWS_AS(parse_rankings("/tmp/choicerank_no_such_corpus.txt"),
                  IoError);

  expect_fail("nohdr", "1: 1,2\n", "line 1");
  expect_fail("hdronly", "# NUMBER ALTERNATIVES: 3\n",
              "no records");
  expect_fail("badn", "# NUMBER ALTERNATIVES: one\n1: 1\n",
              "bad alternative count");
  expect_fail("smalln", "# NUMBER ALTERNATIVES: 1\n1: 1\n",
              "at least 2 alternatives");
  expect_fail("badmult", "# NUMBER ALTERNATIVES: 2\nx: 1,2\n",
              "bad multiplicity");
  expect_fail("zeromult", "# NUMBER ALTERNATIVES: 2\n0: 1,2\n",
              "multiplicity must be positive");
  expect_fail("nocolon", "# NUMBER ALTERNATIVES: 2\n1,2\n",
              "expected 'multiplicity: ranking'");
  expect_fail("unknown", "# NUMBER ALTERNATIVES: 2\n1: 1,5\n",
              "unknown item 5");
  expect_fail("twice", "# NUMBER ALTERNATIVES: 3\n1: 1,2,1\n",
              "ranked twice");
  expect_fail("nest", "# NUMBER ALTERNATIVES: 3\n1: {1,{2}},3\n", "nested");
  expect_fail("unmatched", "# NUMBER ALTERNATIVES: 3\n1: 1}a\n",
              "unmatched '}'");
  expect_fail("unterminated", "# NUMBER ALTERNATIVES: 3\n1: {1,2\n",
              "unterminated '{'");
  expect_fail("baditem", "# NUMBER ALTERNATIVES: 2\n1: 1,zebra\n",
              "bad item id");
  expect_fail("empty2", "# NUMBER ALTERNATIVES: 2\n1: {1,,2}\n", "empty entry");
  expect_fail("nameearly", "# ALTERNATIVE NAME 1: x\n", "before the count");
  expect_fail("lineno",
              "# NUMBER ALTERNATIVES: 2\n1: 1,2\n1: 2,9\n",
              "line 3");
}

TEST_CASE("RankingDataset::validate catches inconsistent structures directly") {
  RankingDataset ds;
  ds.n = 3;
  RankingRecord rec;
  rec.tiers = {{1}, {2}, {3}};
  rec.multiplicity = 2;
  ds.records.push_back(rec);
  ds.total_rankings = 2;
  CHECK_NOTHROW(ds.validate());

  auto bad = ds;
  bad.total_rankings = 5;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("total_rankings"),
                       ValidationError);
  bad = ds;
  bad.records[0].multiplicity = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ds;
  bad.records[0].tiers = {{1}, {}, {2, 3}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("empty tier"),
                       ValidationError);
  bad = ds;
  bad.records[0].tiers = {{1}, {2}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("ranks 2 of 3"),
                       ValidationError);
  bad = ds;
  bad.records[0].tiers = {{1}, {2}, {2}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ds;
  bad.records.clear();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("save_rankings round-trips through parse_rankings") {
  std::string path = write_file("roundtrip_src", kCorpus);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());

  std::string saved = "/tmp/choicerank_test_pref_roundtrip.txt";
  save_rankings(ds, saved);
  auto back = parse_rankings(saved);

  CHECK(back.n == ds.n);
  CHECK(back.total_rankings == ds.total_rankings);
  CHECK(back.names == ds.names);
  REQUIRE(back.records.size() == ds.records.size());
  for (std::size_t r = 0; r < ds.records.size(); ++r) {
    CHECK(back.records[r].multiplicity == ds.records[r].multiplicity);
    CHECK(back.records[r].tiers == ds.records[r].tiers);
  }

  // a second save is byte-identical: the serialisation is canonical
  std::string saved2 = "/tmp/choicerank_test_pref_roundtrip2.txt";
  save_rankings(back, saved2);
  std::ifstream a(saved), b(saved2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  std::remove(saved.c_str());
  std::remove(saved2.c_str());
}

TEST_CASE("empirical pairwise probabilities are exact hand-counted ratios") {
  std::string path = write_file("fractions", kCorpus);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());

  auto model = empirical_choice_probs(ds, 2);
  CHECK(model.n() == 4);
  CHECK(model.proper());
  REQUIRE(model.uniform_menu_size().has_value());
  CHECK(*model.uniform_menu_size() == 2);

  // {1,2}: record one gives item 1 three wins, record two gives item 2 two
  // wins, the tied top tier of record three splits one ranking half-half:
  // item 1 takes (3 + 1/2)/6 = 7/12, item 2 takes (2 + 1/2)/6 = 5/12
  CHECK(model.prob(Menu({1, 2}), 1) == 7.0 / 12.0);
  CHECK(model.prob(Menu({1, 2}), 2) == 5.0 / 12.0);
  // {1,3}: ballots 1 and 3 prefer 1 (4 rankings), ballot 2 ties them
  CHECK(model.prob(Menu({1, 3}), 1) == 10.0 / 12.0);
  CHECK(model.prob(Menu({1, 3}), 3) == 2.0 / 12.0);
  // {3,4}: only ballot three puts 4 above 3
  CHECK(model.prob(Menu({3, 4}), 3) == 10.0 / 12.0);
  CHECK(model.prob(Menu({3, 4}), 4) == 2.0 / 12.0);
  // item 2 beats 3 and 4 on every ballot
  CHECK(model.prob(Menu({2, 3}), 2) == 1.0);
  CHECK(model.prob(Menu({2, 4}), 2) == 1.0);
  CHECK(model.prob(Menu({1, 4}), 1) == 1.0);
}

TEST_CASE("empirical triple probabilities handle within-menu ties exactly") {
  std::string path = write_file("triples", kCorpus);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());

  auto model = empirical_choice_probs(ds, 3);
  // {1,2,3}: ballot one -> item 1 (x3); ballot two -> item 2 (x2); ballot
  // three ties items 1,2 at the top -> half each: (3.5, 2.5, 0)/6
  CHECK(model.prob(Menu({1, 2, 3}), 1) == 21.0 / 36.0);
  CHECK(model.prob(Menu({1, 2, 3}), 2) == 15.0 / 36.0);
  CHECK(model.prob(Menu({1, 2, 3}), 3) == 0.0);
  // {1,3,4}: ballot two ties items 1,3 ahead of 4
  CHECK(model.prob(Menu({1, 3, 4}), 1) == 30.0 / 36.0);
  CHECK(model.prob(Menu({1, 3, 4}), 3) == 6.0 / 36.0);
  CHECK(model.prob(Menu({1, 3, 4}), 4) == 0.0);
  // {2,3,4}: item 2 tops every ballot
  CHECK(model.prob(Menu({2, 3, 4}), 2) == 1.0);

  // every menu is a proper distribution by construction
  CHECK(model.proper());
}

TEST_CASE("empirical_choice_probs validates menu size and guards blowups") {
  std::string path = write_file("guards", kCorpus);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());
  CHECK_THROWS_AS(empirical_choice_probs(ds, 1), ValidationError);
  CHECK_THROWS_AS(empirical_choice_probs(ds, 5), ValidationError);

  // C(40,20) blows the enumeration limit
  RankingDataset wide;
  wide.n = 40;
  RankingRecord rec;
  rec.tiers.resize(1);
  rec.tiers[0].resize(40);
  std::iota(rec.tiers[0].begin(), rec.tiers[0].end(), 1);
  wide.records.push_back(rec);
  wide.total_rankings = 1;
  CHECK_THROWS_WITH_AS(empirical_choice_probs(wide, 20),
                       doctest::Contains("enumeration limit"),
                       ValidationError);

  // lcm(1..43) no longer fits in 64 bits: the exact accumulator refuses
  RankingDataset tall;
  tall.n = 43;
  RankingRecord all;
  all.tiers.resize(1);
  all.tiers[0].resize(43);
  std::iota(all.tiers[0].begin(), all.tiers[0].end(), 1);
  tall.records.push_back(all);
  tall.total_rankings = 1;
  CHECK_THROWS_WITH_AS(empirical_choice_probs(tall, 43),
                       doctest::Contains("overflows"), ValidationError);
}

TEST_CASE("ground truth ordering by pairwise majority with certificate") {
  std::string path = write_file("truth", kCorpus);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());

  auto truth = ground_truth_ordering(ds);
  CHECK(truth.order == std::vector<int>{1, 2, 3, 4});
  // certificate entries are the exact tie-split fractions
  CHECK(truth.pairwise[0][1] == 7.0 / 12.0);
  CHECK(truth.pairwise[1][0] == 5.0 / 12.0);
  CHECK(truth.pairwise[0][2] == 10.0 / 12.0);
  CHECK(truth.pairwise[2][3] == 10.0 / 12.0);
  CHECK(truth.pairwise[0][3] == 1.0);
  CHECK(truth.pairwise[1][3] == 1.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(truth.pairwise[i][i] == 0.5);
    for (int j = 0; j < 4; ++j)
      if (i != j)
        CHECK(truth.pairwise[i][j] + truth.pairwise[j][i] == 1.0);
  }
}

TEST_CASE("ground truth refuses majority cycles, naming the triple") {
  std::string body =
      "# NUMBER ALTERNATIVES: 3\n"
      "1: 1,2,3\n"
      "1: 2,3,1\n"
      "1: 3,1,2\n";
  std::string path = write_file("cycle", body);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());
  CHECK_THROWS_WITH_AS(ground_truth_ordering(ds),
                       doctest::Contains("cycle 1 -> 2 -> 3 -> 1"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(ground_truth_ordering(ds),
                       doctest::Contains("weak stochastic transitivity"),
                       ValidationError);
}

TEST_CASE("ground truth refuses exactly tied pairs") {
  std::string body =
      "# NUMBER ALTERNATIVES: 2\n"
      "1: 1,2\n"
      "1: 2,1\n";
  std::string path = write_file("tied", body);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());
  CHECK_THROWS_WITH_AS(ground_truth_ordering(ds),
                       doctest::Contains("pairwise tied"), ValidationError);
}

TEST_CASE("ordering CSV round-trip and validation") {
  std::vector<int> order = {3, 1, 4, 2};
  std::string path = "/tmp/choicerank_test_pref_order.csv";
  save_ordering(order, path);
  CHECK(load_ordering(path) == order);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_ordering("/tmp/choicerank_no_order.csv"), IoError);

  auto write_raw = [](const std::string& stem, const std::string& body) {
    std::string p = "/tmp/choicerank_test_pref_ordbad_" + stem + ".csv";
    std::ofstream out(p);
    out << body;
    out.close();
    return p;
  };
  std::string p1 = write_raw("gap", "rank,item\n1,2\n3,1\n");
  CHECK_THROWS_WITH_AS(load_ordering(p1), doctest::Contains("expected rank 2"),
                       ValidationError);
  std::string p2 = write_raw("perm", "rank,item\n1,2\n2,2\n");
  CHECK_THROWS_WITH_AS(load_ordering(p2), doctest::Contains("permutation"),
                       ValidationError);
  std::string p3 = write_raw("row", "rank,item\n1;2\n");
  CHECK_THROWS_AS(load_ordering(p3), ValidationError);
  std::string p4 = write_raw("empty", "rank,item\n");
  CHECK_THROWS_AS(load_ordering(p4), ValidationError);
  for (const auto& p : {p1, p2, p3, p4}) std::remove(p.c_str());
}

TEST_CASE("empirical probabilities and ground truth agree on a clean corpus") {
  // unanimous corpus: Borda order of the empirical model must match the
  // pairwise-majority ground truth
  std::string body =
      "# NUMBER ALTERNATIVES: 4\n"
      "5: 2,4,1,3\n"
      "3: 2,4,3,1\n"
      "2: 4,2,1,3\n";
  std::string path = write_file("agree", body);
  auto ds = parse_rankings(path);
  std::remove(path.c_str());

  auto truth = ground_truth_ordering(ds);
  CHECK(truth.order == std::vector<int>{2, 4, 1, 3});

  auto model = empirical_choice_probs(ds, 2);
  // column sums of the pairwise win fractions order the items
  std::vector<double> score(4, 0.0);
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j) {
      score[i - 1] += model.prob(Menu({i, j}), i);
      score[j - 1] += model.prob(Menu({i, j}), j);
    }
  CHECK(order_by_score_desc(score) == truth.order);
}
