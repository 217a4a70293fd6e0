#include "choicerank/preflib.hpp"

#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

namespace choicerank {

void RankingDataset::validate() const {
  if (n < 2)
    throw ValidationError("ranking dataset needs at least 2 alternatives");
  if (records.empty())
    throw ValidationError("ranking dataset has no records");
  std::int64_t total = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.multiplicity < 1)
      throw ValidationError("record " + std::to_string(r + 1) +
                            " has nonpositive multiplicity");
    std::vector<char> seen(n + 1, 0);
    int count = 0;
    for (const auto& tier : record.tiers) {
      if (tier.empty())
        throw ValidationError("record " + std::to_string(r + 1) +
                              " contains an empty tier");
      for (int item : tier) {
        if (item < 1 || item > n)
          throw ValidationError("record " + std::to_string(r + 1) +
                                " ranks unknown item " + std::to_string(item));
        if (seen[item])
          throw ValidationError("record " + std::to_string(r + 1) +
                                " ranks item " + std::to_string(item) +
                                " twice");
        seen[item] = 1;
        ++count;
      }
    }
    if (count != n)
      throw ValidationError("record " + std::to_string(r + 1) + " ranks " +
                            std::to_string(count) + " of " + std::to_string(n) +
                            " items (records are completed at parse time)");
    total += record.multiplicity;
  }
  if (total != total_rankings)
    throw ValidationError("total_rankings " + std::to_string(total_rankings) +
                          " does not match the multiplicity sum " +
                          std::to_string(total));
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line_no) + ": " + msg);
}

std::int64_t parse_count(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument("trailing");
    if (v < 1) fail(line_no, "multiplicity must be positive, got " + trim(s));
    return v;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    fail(line_no, "bad multiplicity '" + trim(s) + "'");
  }
}

// Parses "a,b,{c,d},e" into tiers. Items inside braces are one tier.
std::vector<std::vector<int>> parse_tiers(const std::string& body, int line_no) {
  std::vector<std::vector<int>> tiers;
  std::vector<int> tier;
  std::string token;
  bool in_brace = false;

  auto flush_token = [&]() {
    std::string t = trim(token);
    token.clear();
    if (t.empty()) fail(line_no, "empty entry in ranking");
    try {
      std::size_t pos = 0;
      int v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument("trailing");
      tier.push_back(v);
    } catch (const std::exception&) {
      fail(line_no, "bad item id '" + t + "'");
    }
  };
  auto flush_tier = [&]() {
    std::sort(tier.begin(), tier.end());
    tiers.push_back(std::move(tier));
    tier.clear();
  };

  for (char c : body) {
    switch (c) {
      case '{':
        if (in_brace) fail(line_no, "nested '{'");
        if (!trim(token).empty()) fail(line_no, "'{' in the middle of an entry");
        in_brace = true;
        break;
      case '}':
        if (!in_brace) fail(line_no, "unmatched '}'");
        flush_token();
        flush_tier();
        in_brace = false;
        break;
      case ',':
        if (in_brace) {
          flush_token();
        } else if (!trim(token).empty()) {
          flush_token();
          flush_tier();
        }
        // else: separator right after a closing brace
        break;
      default:
        token += c;
    }
  }
  if (in_brace) fail(line_no, "unterminated '{'");
  if (!trim(token).empty()) {
    flush_token();
    flush_tier();
  }
  if (tiers.empty()) fail(line_no, "ranking lists no items");
  return tiers;
}

}  // namespace

RankingDataset parse_rankings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  RankingDataset dataset;
  std::string line;
  int line_no = 0;
  bool have_n = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;

    if (t[0] == '#') {
      std::string meta = trim(t.substr(1));
      if (starts_with(meta, "NUMBER ALTERNATIVES:")) {
        std::string value = trim(meta.substr(std::string("NUMBER ALTERNATIVES:").size()));
        try {
          dataset.n = std::stoi(value);
        } catch (const std::exception&) {
          fail(line_no, "bad alternative count '" + value + "'");
        }
        if (dataset.n < 2)
          fail(line_no, "need at least 2 alternatives, got " + value);
        have_n = true;
        dataset.names.assign(dataset.n, "");
      } else if (starts_with(meta, "ALTERNATIVE NAME ")) {
        if (!have_n) fail(line_no, "alternative name before the count");
        std::string rest = meta.substr(std::string("ALTERNATIVE NAME ").size());
        std::size_t colon = rest.find(':');
        if (colon == std::string::npos) fail(line_no, "missing ':' in name line");
        int idx = 0;
        try {
          idx = std::stoi(trim(rest.substr(0, colon)));
        } catch (const std::exception&) {
          fail(line_no, "bad alternative index in name line");
        }
        if (idx < 1 || idx > dataset.n)
          fail(line_no, "alternative index " + std::to_string(idx) +
                            " outside [1," + std::to_string(dataset.n) + "]");
        dataset.names[idx - 1] = trim(rest.substr(colon + 1));
      }
      // Other metadata lines are fine to skip.
      continue;
    }

    if (!have_n)
      fail(line_no, "data before the '# NUMBER ALTERNATIVES:' header");

    std::size_t colon = t.find(':');
    if (colon == std::string::npos)
      fail(line_no, "expected 'multiplicity: ranking', got '" + t + "'");

    RankingRecord record;
    record.multiplicity = parse_count(t.substr(0, colon), line_no);
    record.tiers = parse_tiers(t.substr(colon + 1), line_no);

    // Validate ids, then complete a truncated ranking with one bottom tier.
    std::vector<char> seen(dataset.n + 1, 0);
    for (const auto& tier : record.tiers)
      for (int item : tier) {
        if (item < 1 || item > dataset.n)
          fail(line_no, "unknown item " + std::to_string(item));
        if (seen[item])
          fail(line_no, "item " + std::to_string(item) + " ranked twice");
        seen[item] = 1;
      }
    std::vector<int> missing;
    for (int i = 1; i <= dataset.n; ++i)
      if (!seen[i]) missing.push_back(i);
    if (!missing.empty()) record.tiers.push_back(std::move(missing));

    dataset.total_rankings += record.multiplicity;
    dataset.records.push_back(std::move(record));
  }

  if (!have_n)
    throw ValidationError("'" + path +
                          "' has no '# NUMBER ALTERNATIVES:' header");
  dataset.validate();

  bool any_name = false;
  for (const auto& name : dataset.names)
    if (!name.empty()) any_name = true;
  if (!any_name) dataset.names.clear();
  return dataset;
}

void save_rankings(const RankingDataset& dataset, const std::string& path) {
  dataset.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# NUMBER ALTERNATIVES: " << dataset.n << "\n";
  for (std::size_t i = 0; i < dataset.names.size(); ++i)
    out << "# ALTERNATIVE NAME " << (i + 1) << ": " << dataset.names[i] << "\n";
  for (const auto& record : dataset.records) {
    out << record.multiplicity << ": ";
    for (std::size_t t = 0; t < record.tiers.size(); ++t) {
      if (t) out << ",";
      const auto& tier = record.tiers[t];
      if (tier.size() > 1) out << "{";
      for (std::size_t k = 0; k < tier.size(); ++k) {
        if (k) out << ",";
        out << tier[k];
      }
      if (tier.size() > 1) out << "}";
    }
    out << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

TabularChoiceModel empirical_choice_probs(const RankingDataset& dataset, int m) {
  dataset.validate();
  int n = dataset.n;
  if (m < 2 || m > n)
    throw ValidationError("menu size m must satisfy 2 <= m <= n, got m = " +
                          std::to_string(m) + " with n = " + std::to_string(n));
  if (binom_real(n, m) > 1e7)
    throw ValidationError("C(n,m) exceeds the enumeration limit of 1e7");

  // Win masses are multiples of 1/l for tie sizes l <= m; accumulate in
  // integer units of 1/lcm(1..m) so every intermediate stays exact.
  std::int64_t unit = 1;
  for (int l = 2; l <= m; ++l) {
    std::int64_t g = std::gcd(unit, static_cast<std::int64_t>(l));
    if (unit > INT64_MAX / (l / g))
      throw ValidationError("lcm(1.." + std::to_string(m) +
                            ") overflows the exact win accumulator");
    unit *= l / g;
  }
  double denom = static_cast<double>(unit) *
                 static_cast<double>(dataset.total_rankings);

  // tier_of[r][i] is the tier index of item i+1 in record r.
  std::vector<std::vector<int>> tier_of(dataset.records.size(),
                                        std::vector<int>(n, -1));
  for (std::size_t r = 0; r < dataset.records.size(); ++r)
    for (std::size_t t = 0; t < dataset.records[r].tiers.size(); ++t)
      for (int item : dataset.records[r].tiers[t])
        tier_of[r][item - 1] = static_cast<int>(t);

  TabularChoiceModel model(n);
  MenuEnumerator menus(n, m);
  std::vector<std::int64_t> units(m);
  std::vector<int> at_top(m);
  for (; menus.valid(); menus.advance()) {
    const Menu& menu = menus.current();
    std::fill(units.begin(), units.end(), 0);
    for (std::size_t r = 0; r < dataset.records.size(); ++r) {
      const auto& tiers = tier_of[r];
      int best = tiers[menu.items[0] - 1];
      int l = 0;
      for (int k = 0; k < m; ++k) {
        int t = tiers[menu.items[k] - 1];
        if (t < best) {
          best = t;
          l = 0;
        }
        if (t == best) at_top[l++] = k;
      }
      std::int64_t share = dataset.records[r].multiplicity * (unit / l);
      for (int k = 0; k < l; ++k) units[at_top[k]] += share;
    }
    std::int64_t mass = std::accumulate(units.begin(), units.end(),
                                        static_cast<std::int64_t>(0));
    if (mass == 0)
      throw ValidationError("menu " + menu.to_string() +
                            " received no win mass");
    std::vector<double> probs(m);
    for (int k = 0; k < m; ++k)
      probs[k] = static_cast<double>(units[k]) / denom;
    model.set_menu(menu, std::move(probs));
  }
  return model;
}

GroundTruth ground_truth_ordering(const RankingDataset& dataset) {
  dataset.validate();
  int n = dataset.n;

  // Pairwise win mass in half units so ties split exactly.
  std::vector<std::vector<std::int64_t>> half(
      n, std::vector<std::int64_t>(n, 0));
  for (const auto& record : dataset.records) {
    std::vector<int> tier(n, -1);
    for (std::size_t t = 0; t < record.tiers.size(); ++t)
      for (int item : record.tiers[t]) tier[item - 1] = static_cast<int>(t);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (tier[i] < tier[j])
          half[i][j] += 2 * record.multiplicity;
        else if (tier[j] < tier[i])
          half[j][i] += 2 * record.multiplicity;
        else {
          half[i][j] += record.multiplicity;
          half[j][i] += record.multiplicity;
        }
      }
  }

  GroundTruth truth;
  truth.pairwise.assign(n, std::vector<double>(n, 0.5));
  double denom = 2.0 * static_cast<double>(dataset.total_rankings);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        truth.pairwise[i][j] = static_cast<double>(half[i][j]) / denom;

  auto beats = [&](int i, int j) { return half[i][j] > half[j][i]; };

  // A strict total order exists iff the majority tournament is transitive;
  // diagnose failures precisely before trusting the sort.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        int ids[3] = {i, j, k};
        // Check the triangle in both rotational directions.
        for (int dir = 0; dir < 2; ++dir) {
          int a = ids[0], b = ids[dir ? 2 : 1], c = ids[dir ? 1 : 2];
          if (beats(a, b) && beats(b, c) && beats(c, a))
            throw ValidationError(
                "pairwise majority cycle " + std::to_string(a + 1) + " -> " +
                std::to_string(b + 1) + " -> " + std::to_string(c + 1) +
                " -> " + std::to_string(a + 1) +
                "; weak stochastic transitivity fails");
        }
      }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (half[i][j] == half[j][i])
        throw ValidationError("items " + std::to_string(i + 1) + " and " +
                              std::to_string(j + 1) +
                              " are pairwise tied; majority order undefined");

  truth.order.resize(n);
  std::iota(truth.order.begin(), truth.order.end(), 1);
  std::sort(truth.order.begin(), truth.order.end(), [&](int a, int b) {
    return beats(a - 1, b - 1);
  });
  return truth;
}

void save_ordering(const std::vector<int>& order, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "rank,item\n";
  for (std::size_t r = 0; r < order.size(); ++r)
    out << (r + 1) << "," << order[r] << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<int> load_ordering(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<int> order;
  std::string line;
  int line_no = 0;
  int expected_rank = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t == "rank,item") continue;
    std::size_t comma = t.find(',');
    if (comma == std::string::npos)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 'rank,item', got '" + t + "'");
    try {
      int rank = std::stoi(t.substr(0, comma));
      int item = std::stoi(t.substr(comma + 1));
      if (rank != expected_rank)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": expected rank " +
                              std::to_string(expected_rank) + ", got " +
                              std::to_string(rank));
      order.push_back(item);
      ++expected_rank;
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": bad 'rank,item' row '" + t + "'");
    }
  }
  if (order.empty())
    throw ValidationError("ordering file '" + path + "' is empty");
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i + 1))
      throw ValidationError("ordering file '" + path +
                            "' is not a permutation of 1.." +
                            std::to_string(sorted.size()));
  return order;
}

}  // namespace choicerank
