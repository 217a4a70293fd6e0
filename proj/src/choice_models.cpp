#include "choicerank/choice_models.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace choicerank {

NoiseFamily noise_from_string(const std::string& name) {
  if (name == "gumbel") return NoiseFamily::GumbelStandard;
  if (name == "normal") return NoiseFamily::NormalStandard;
  if (name == "exponential") return NoiseFamily::ExponentialUnit;
  throw ValidationError("unknown noise family '" + name +
                        "' (expected gumbel, normal or exponential)");
}

std::string noise_to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::GumbelStandard: return "gumbel";
    case NoiseFamily::NormalStandard: return "normal";
    case NoiseFamily::ExponentialUnit: return "exponential";
  }
  return "?";
}

PartworthVector PartworthVector::of(std::vector<double> values) {
  if (values.size() < 2)
    throw ValidationError("a choice model needs at least 2 items, got " +
                          std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw ValidationError("partworth " + std::to_string(i + 1) +
                            " is not finite");
  PartworthVector p;
  p.values = std::move(values);
  return p;
}

bool PartworthVector::non_degenerate() const {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::vector<double> ParametricChoiceModel::mnl_weights() const {
  std::vector<double> w(partworths.values.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::exp(partworths.values[i]);
  return w;
}

static void check_weights(const std::vector<double>& weights) {
  if (weights.size() < 2)
    throw ValidationError("MNL needs at least 2 weights");
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw ValidationError("MNL weight " + std::to_string(i + 1) +
                            " must be positive and finite");
}

double mnl_choice_prob(const std::vector<double>& weights, const Menu& menu,
                       int item) {
  check_weights(weights);
  int n = static_cast<int>(weights.size());
  if (menu.index_of(item) < 0)
    throw ValidationError("item " + std::to_string(item) + " not in menu " +
                          menu.to_string());
  double total = 0.0;
  for (int k : menu.items) {
    if (k > n)
      throw ValidationError("menu item " + std::to_string(k) +
                            " exceeds item count " + std::to_string(n));
    total += weights[k - 1];
  }
  return weights[item - 1] / total;
}

static double draw_noise(NoiseFamily family, Rng& rng) {
  switch (family) {
    case NoiseFamily::GumbelStandard: return rng.gumbel();
    case NoiseFamily::NormalStandard: return rng.normal();
    case NoiseFamily::ExponentialUnit: return rng.exponential();
  }
  return 0.0;
}

int sample_choice(const ParametricChoiceModel& model, const Menu& menu,
                  Rng& rng) {
  if (menu.size() < 2)
    throw ValidationError("degenerate menu " + menu.to_string());
  const auto& u = model.partworths.values;
  int n = model.n();
  int best = 0;
  double best_x = 0.0;
  for (int idx = 0; idx < menu.size(); ++idx) {
    int item = menu.items[idx];
    if (item > n)
      throw ValidationError("menu item " + std::to_string(item) +
                            " exceeds item count " + std::to_string(n));
    double x = u[item - 1] + draw_noise(model.noise, rng);
    // Strict > keeps ties on the lowest index (menus are sorted ascending).
    if (idx == 0 || x > best_x) {
      best = item;
      best_x = x;
    }
  }
  return best;
}

McEstimate mc_choice_prob(const ParametricChoiceModel& model, const Menu& menu,
                          int item, std::int64_t num_samples, Rng& rng) {
  if (num_samples < 1)
    throw ValidationError("num_samples must be positive");
  if (menu.index_of(item) < 0)
    throw ValidationError("item " + std::to_string(item) + " not in menu " +
                          menu.to_string());
  std::int64_t wins = 0;
  for (std::int64_t t = 0; t < num_samples; ++t)
    if (sample_choice(model, menu, rng) == item) ++wins;
  McEstimate est;
  est.samples = num_samples;
  est.p_hat = static_cast<double>(wins) / static_cast<double>(num_samples);
  est.std_error =
      std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(num_samples));
  return est;
}

TabularChoiceModel::TabularChoiceModel(int n_items) : n_(n_items) {
  if (n_items < 2)
    throw ValidationError("a tabular model needs at least 2 items, got " +
                          std::to_string(n_items));
}

void TabularChoiceModel::set_menu(const Menu& menu, std::vector<double> probs,
                                  ProbabilityHandling handling) {
  if (menu.size() < 2 || menu.items.front() < 1 || menu.items.back() > n_)
    throw ValidationError("menu " + menu.to_string() +
                          " invalid for item count " + std::to_string(n_));
  if (static_cast<int>(probs.size()) != menu.size())
    throw ValidationError("menu " + menu.to_string() + " got " +
                          std::to_string(probs.size()) + " probabilities");
  double sum = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (!(probs[k] >= 0.0) || !std::isfinite(probs[k]))
      throw ValidationError("probability for item " +
                            std::to_string(menu.items[k]) + " in menu " +
                            menu.to_string() + " must be nonnegative");
    sum += probs[k];
  }
  if (handling == ProbabilityHandling::Strict) {
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("probabilities for menu " + menu.to_string() +
                            " sum to " + format_double_exact(sum));
  } else if (!(sum > 0.0)) {
    throw ValidationError("menu " + menu.to_string() +
                          " has zero total mass");
  }
  table_[menu] = std::move(probs);
}

bool TabularChoiceModel::proper() const {
  for (const auto& [menu, probs] : table_) {
    double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) return false;
  }
  return true;
}

double TabularChoiceModel::max_menu_total() const {
  double max_total = 0.0;
  for (const auto& [menu, probs] : table_)
    max_total = std::max(max_total,
                         std::accumulate(probs.begin(), probs.end(), 0.0));
  return max_total;
}

bool TabularChoiceModel::has_menu(const Menu& menu) const {
  return table_.count(menu) != 0;
}

const std::vector<double>& TabularChoiceModel::menu_probs(const Menu& menu) const {
  auto it = table_.find(menu);
  if (it == table_.end())
    throw ValidationError("menu " + menu.to_string() +
                          " not present in tabular model");
  return it->second;
}

double TabularChoiceModel::prob(const Menu& menu, int item) const {
  int pos = menu.index_of(item);
  if (pos < 0)
    throw ValidationError("item " + std::to_string(item) + " not in menu " +
                          menu.to_string());
  return menu_probs(menu)[pos];
}

std::optional<int> TabularChoiceModel::uniform_menu_size() const {
  std::optional<int> size;
  for (const auto& [menu, probs] : table_) {
    if (!size) size = menu.size();
    else if (*size != menu.size()) return std::nullopt;
  }
  return size;
}

TabularChoiceModel tabular_from_matrix(const std::vector<std::vector<double>>& P,
                                       ProbabilityHandling handling) {
  int n = static_cast<int>(P.size());
  if (n < 2) throw ValidationError("preference matrix needs at least 2 items");
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(P[i].size()) != n)
      throw ValidationError("preference matrix row " + std::to_string(i + 1) +
                            " has " + std::to_string(P[i].size()) +
                            " entries, expected " + std::to_string(n));
  for (int i = 0; i < n; ++i) {
    if (std::abs(P[i][i] - 0.5) > 1e-9)
      throw ValidationError("P[" + std::to_string(i + 1) + "][" +
                            std::to_string(i + 1) + "] = " +
                            format_double_exact(P[i][i]) +
                            ", diagonal must be 0.5");
    for (int j = 0; j < n; ++j) {
      if (!(P[i][j] >= 0.0 && P[i][j] <= 1.0))
        throw ValidationError("P[" + std::to_string(i + 1) + "][" +
                              std::to_string(j + 1) + "] = " +
                              format_double_exact(P[i][j]) +
                              " outside [0,1]");
      if (handling == ProbabilityHandling::Strict && i != j &&
          std::abs(P[i][j] + P[j][i] - 1.0) > 1e-9)
        throw ValidationError("P[" + std::to_string(i + 1) + "][" +
                              std::to_string(j + 1) + "] + P[" +
                              std::to_string(j + 1) + "][" +
                              std::to_string(i + 1) + "] = " +
                              format_double_exact(P[i][j] + P[j][i]) +
                              ", expected 1");
    }
  }
  TabularChoiceModel model(n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      // Entry (i,j) of the matrix is the probability that j beats i, so
      // choosing i from {i,j} has probability P[j][i] (1-based shift).
      model.set_menu(Menu({i, j}), {P[j - 1][i - 1], P[i - 1][j - 1]},
                     handling);
    }
  }
  return model;
}

std::vector<std::vector<double>> counterexample_matrix() {
  return {{0.50, 0.60, 0.55, 0.55},
          {0.20, 0.50, 0.85, 0.60},
          {0.45, 0.40, 0.50, 0.95},
          {0.45, 0.45, 0.15, 0.50}};
}

std::vector<double> hard_instance_mnl(int n, int K, double v, double delta,
                                      const std::vector<int>& top_set) {
  if (n < 2) throw ValidationError("hard instance needs n >= 2");
  if (K < 1 || K >= n)
    throw ValidationError("hard instance needs 1 <= K < n, got K = " +
                          std::to_string(K));
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError("hard instance needs v > 0");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("hard instance needs delta > 0");
  if (static_cast<int>(top_set.size()) != K)
    throw ValidationError("top set has " + std::to_string(top_set.size()) +
                          " items, expected K = " + std::to_string(K));
  std::vector<double> w(n, v);
  std::vector<bool> seen(n + 1, false);
  for (int item : top_set) {
    if (item < 1 || item > n)
      throw ValidationError("top set item " + std::to_string(item) +
                            " outside [1," + std::to_string(n) + "]");
    if (seen[item])
      throw ValidationError("top set repeats item " + std::to_string(item));
    seen[item] = true;
    w[item - 1] = v + delta;
  }
  return w;
}

void save_tabular(const TabularChoiceModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [menu, probs] : model.menus()) {
    out << menu.size() << ';';
    for (int k = 0; k < menu.size(); ++k) {
      if (k) out << ',';
      out << menu.items[k];
    }
    out << ';';
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (k) out << ',';
      out << format_double_exact(probs[k]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

static std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

static int parse_int(const std::string& s, const std::string& what, int line_no) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad " + what +
                          " '" + s + "'");
  }
}

static double parse_real(const std::string& s, const std::string& what,
                         int line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line_no) + ": bad " + what +
                          " '" + s + "'");
  }
}

TabularChoiceModel load_tabular(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  struct Row {
    Menu menu;
    std::vector<double> probs;
  };
  std::vector<Row> rows;
  int max_item = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, ';');
    if (fields.size() != 3)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 'm;items;probs', got '" + line + "'");
    int m = parse_int(fields[0], "menu size", line_no);
    auto item_strs = split(fields[1], ',');
    auto prob_strs = split(fields[2], ',');
    if (static_cast<int>(item_strs.size()) != m ||
        static_cast<int>(prob_strs.size()) != m)
      throw ValidationError("line " + std::to_string(line_no) + ": declared " +
                            std::to_string(m) + " items, found " +
                            std::to_string(item_strs.size()) + " items and " +
                            std::to_string(prob_strs.size()) +
                            " probabilities");
    Row row;
    std::vector<int> items;
    for (const auto& s : item_strs)
      items.push_back(parse_int(s, "item index", line_no));
    for (const auto& s : prob_strs)
      row.probs.push_back(parse_real(s, "probability", line_no));
    try {
      row.menu = Menu::of(items);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (row.menu.items != items)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": menu items must be listed in increasing order");
    max_item = std::max(max_item, row.menu.items.back());
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw ValidationError("tabular model file '" + path + "' has no menus");
  TabularChoiceModel model(max_item);
  for (auto& row : rows) {
    if (model.has_menu(row.menu))
      throw ValidationError("menu " + row.menu.to_string() +
                            " appears twice in '" + path + "'");
    try {
      model.set_menu(row.menu, std::move(row.probs),
                     ProbabilityHandling::FaceValue);
    } catch (const ValidationError& e) {
      throw ValidationError("'" + path + "': " + e.what());
    }
  }
  return model;
}

double ChoiceProbabilitySource::prob(const Menu& menu, int item) const {
  int pos = menu.index_of(item);
  if (pos < 0)
    throw ValidationError("item " + std::to_string(item) + " not in menu " +
                          menu.to_string());
  std::vector<double> p(menu.size());
  menu_probs(menu, p);
  return p[pos];
}

MnlSource::MnlSource(std::vector<double> weights) : weights_(std::move(weights)) {
  check_weights(weights_);
}

void MnlSource::menu_probs(const Menu& menu, std::span<double> out) const {
  double total = 0.0;
  int n = item_count();
  for (int k = 0; k < menu.size(); ++k) {
    int item = menu.items[k];
    if (item > n)
      throw ValidationError("menu item " + std::to_string(item) +
                            " exceeds item count " + std::to_string(n));
    total += weights_[item - 1];
  }
  for (int k = 0; k < menu.size(); ++k)
    out[k] = weights_[menu.items[k] - 1] / total;
}

void TabularSource::menu_probs(const Menu& menu, std::span<double> out) const {
  const auto& probs = model_->menu_probs(menu);
  for (std::size_t k = 0; k < probs.size(); ++k) out[k] = probs[k];
}

}  // namespace choicerank
