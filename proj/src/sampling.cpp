#include "choicerank/sampling.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace choicerank {

void SamplingConfig::validate() const {
  if (n < 2) throw ValidationError("n must be at least 2, got " + std::to_string(n));
  if (m < 2 || m > n)
    throw ValidationError("menu size m must satisfy 2 <= m <= n, got m = " +
                          std::to_string(m) + " with n = " + std::to_string(n));
  if (!(p > 0.0 && p <= 1.0))
    throw ValidationError("offer probability p must be in (0,1], got " +
                          format_double_exact(p));
  if (R < 1) throw ValidationError("round count R must be positive, got " +
                                   std::to_string(R));
  double candidates = static_cast<double>(R) * binom_real(n, m);
  if (candidates > 1e9 && !allow_large)
    throw ValidationError(
        "R * C(n,m) = " + format_double_exact(candidates) +
        " candidate trials exceeds 1e9; pass the large-run override to proceed");
}

int ChoiceDataset::menu_size() const {
  if (observations.empty())
    throw ValidationError("dataset is empty, menu size undefined");
  int m = observations.front().menu.size();
  for (const auto& obs : observations)
    if (obs.menu.size() != m)
      throw ValidationError("dataset mixes menu sizes " + std::to_string(m) +
                            " and " + std::to_string(obs.menu.size()));
  return m;
}

void ChoiceDataset::validate() const {
  for (std::size_t idx = 0; idx < observations.size(); ++idx) {
    const auto& obs = observations[idx];
    if (obs.round < 1)
      throw ValidationError("observation " + std::to_string(idx + 1) +
                            " has round " + std::to_string(obs.round));
    if (obs.menu.size() < 2 || obs.menu.items.front() < 1 ||
        obs.menu.items.back() > n)
      throw ValidationError("observation " + std::to_string(idx + 1) +
                            " has invalid menu " + obs.menu.to_string() +
                            " for n = " + std::to_string(n));
    if (obs.menu.index_of(obs.chosen) < 0)
      throw ValidationError("observation " + std::to_string(idx + 1) +
                            " chose item " + std::to_string(obs.chosen) +
                            " outside its menu " + obs.menu.to_string());
  }
}

double expected_sample_size(const SamplingConfig& config) {
  config.validate();
  return config.p * static_cast<double>(config.R) *
         binom_real(config.n, config.m);
}

namespace {

// Shared simulation core. draw(menu, rng) returns the chosen item, or 0 to
// drop the candidate (rejection step for face-value tabular models whose
// menu masses sum below the model maximum). Each (round, menu) candidate
// owns the derived stream mix_seed(seed, r*C + rank) whose first uniform
// decides inclusion and whose tail drives the choice, making the draw
// independent of the offer probability.
template <typename DrawFn>
std::vector<ChoiceDataset> simulate_core(int n, const SamplingConfig& config,
                                         std::span<const double> p_values,
                                         DrawFn&& draw, int threads) {
  if (p_values.empty())
    throw ValidationError("at least one offer probability required");
  for (double p : p_values)
    if (!(p > 0.0 && p <= 1.0))
      throw ValidationError("offer probability must be in (0,1], got " +
                            format_double_exact(p));

  SamplingConfig check = config;
  check.n = n;
  check.p = *std::max_element(p_values.begin(), p_values.end());
  check.validate();

  std::uint64_t menus_per_round = binom(n, config.m);
  int levels = static_cast<int>(p_values.size());

  // One bucket per (round, level); merged in round order afterwards so the
  // result is independent of how rounds are distributed over threads.
  std::vector<std::vector<std::vector<Observation>>> per_round(config.R);

  parallel_for_chunks(config.R, threads, [&](int round_idx) {
    auto& buckets = per_round[round_idx];
    buckets.resize(levels);
    std::uint64_t base =
        static_cast<std::uint64_t>(round_idx) * menus_per_round;
    MenuEnumerator menus(n, config.m);
    for (std::uint64_t rank = 0; menus.valid(); menus.advance(), ++rank) {
      Rng stream(mix_seed(config.seed, base + rank));
      double u = stream.uniform01();
      int chosen = 0;
      bool drawn = false;
      for (int level = 0; level < levels; ++level) {
        if (u >= p_values[level]) continue;
        if (!drawn) {
          chosen = draw(menus.current(), stream);
          drawn = true;
        }
        if (chosen == 0) continue;  // rejected: no observation at any level
        buckets[level].push_back(
            Observation{round_idx + 1, menus.current(), chosen});
      }
    }
  });

  std::vector<ChoiceDataset> out(levels);
  for (int level = 0; level < levels; ++level) {
    out[level].n = n;
    std::size_t total = 0;
    for (const auto& buckets : per_round) total += buckets[level].size();
    out[level].observations.reserve(total);
    for (auto& buckets : per_round)
      out[level].observations.insert(out[level].observations.end(),
                                     buckets[level].begin(),
                                     buckets[level].end());
  }
  return out;
}

// Tabular draw with face-value support: win masses are rescaled by a common
// factor (1 over the model's largest menu total) so every menu fits in a
// probability, and the leftover mass rejects the candidate. Relative win
// rates across menus are preserved exactly, which is what keeps count-based
// Borda scores faithful to the stated masses. For proper models the scale
// is 1 and the leftover is pure rounding, so the draw never rejects.
int draw_tabular(const TabularChoiceModel& model, double scale,
                 const Menu& menu, Rng& rng) {
  const auto& probs = model.menu_probs(menu);
  double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += scale * probs[k];
    if (u < acc) return menu.items[k];
  }
  if (1.0 - acc > 1e-9) return 0;  // genuine gap: reject
  return menu.items.back();        // hairline gap: acc rounding below 1
}

double tabular_draw_scale(const TabularChoiceModel& model) {
  return 1.0 / std::max(1.0, model.max_menu_total());
}

}  // namespace

ChoiceDataset simulate_dataset(const ParametricChoiceModel& model,
                               const SamplingConfig& config, int threads) {
  double p = config.p;
  return std::move(simulate_core(
      model.n(), config, std::span<const double>(&p, 1),
      [&](const Menu& menu, Rng& rng) { return sample_choice(model, menu, rng); },
      threads)[0]);
}

ChoiceDataset simulate_dataset(const TabularChoiceModel& model,
                               const SamplingConfig& config, int threads) {
  double p = config.p;
  double scale = tabular_draw_scale(model);
  return std::move(simulate_core(
      model.n(), config, std::span<const double>(&p, 1),
      [&](const Menu& menu, Rng& rng) {
        return draw_tabular(model, scale, menu, rng);
      },
      threads)[0]);
}

std::vector<ChoiceDataset> simulate_nested_datasets(
    const ParametricChoiceModel& model, const SamplingConfig& config,
    std::span<const double> p_values, int threads) {
  return simulate_core(
      model.n(), config, p_values,
      [&](const Menu& menu, Rng& rng) { return sample_choice(model, menu, rng); },
      threads);
}

std::vector<ChoiceDataset> simulate_nested_datasets(
    const TabularChoiceModel& model, const SamplingConfig& config,
    std::span<const double> p_values, int threads) {
  double scale = tabular_draw_scale(model);
  return simulate_core(
      model.n(), config, p_values,
      [&](const Menu& menu, Rng& rng) {
        return draw_tabular(model, scale, menu, rng);
      },
      threads);
}

// --------------------------------------------------------------------------
// Serialisation. Text and gzip paths share the line-oriented logic through
// small reader/writer shims.

namespace {

bool has_gz_suffix(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

class LineWriter {
 public:
  explicit LineWriter(const std::string& path) : path_(path) {
    if (has_gz_suffix(path)) {
      gz_ = gzopen(path.c_str(), "wb");
      if (!gz_) throw IoError("cannot open '" + path + "' for writing");
    } else {
      out_.open(path);
      if (!out_) throw IoError("cannot open '" + path + "' for writing");
    }
  }
  ~LineWriter() {
    if (gz_) gzclose(gz_);
  }
  void write(const std::string& line) {
    if (gz_) {
      if (gzwrite(gz_, line.data(), static_cast<unsigned>(line.size())) !=
          static_cast<int>(line.size()))
        throw IoError("write to '" + path_ + "' failed");
    } else {
      out_ << line;
      if (!out_) throw IoError("write to '" + path_ + "' failed");
    }
  }

 private:
  std::string path_;
  std::ofstream out_;
  gzFile gz_ = nullptr;
};

class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    if (has_gz_suffix(path)) {
      gz_ = gzopen(path.c_str(), "rb");
      if (!gz_) throw IoError("cannot open '" + path + "'");
    } else {
      in_.open(path);
      if (!in_) throw IoError("cannot open '" + path + "'");
    }
  }
  ~LineReader() {
    if (gz_) gzclose(gz_);
  }
  bool next(std::string& line) {
    if (gz_) {
      line.clear();
      char buf[4096];
      while (true) {
        if (gzgets(gz_, buf, sizeof buf) == nullptr)
          return !line.empty();
        line += buf;
        if (!line.empty() && line.back() == '\n') {
          line.pop_back();
          return true;
        }
      }
    }
    return static_cast<bool>(std::getline(in_, line));
  }

 private:
  std::string path_;
  std::ifstream in_;
  gzFile gz_ = nullptr;
};

}  // namespace

void save_dataset(const ChoiceDataset& dataset, const std::string& path) {
  dataset.validate();
  LineWriter writer(path);
  std::string line;
  for (const auto& obs : dataset.observations) {
    line = std::to_string(obs.round);
    line += ';';
    line += std::to_string(obs.menu.size());
    line += ';';
    for (int k = 0; k < obs.menu.size(); ++k) {
      if (k) line += ',';
      line += std::to_string(obs.menu.items[k]);
    }
    line += ';';
    line += std::to_string(obs.chosen);
    line += '\n';
    writer.write(line);
  }
}

ChoiceDataset load_dataset(const std::string& path) {
  LineReader reader(path);
  ChoiceDataset dataset;
  std::string line;
  int line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    {
      std::string cur;
      for (char c : line) {
        if (c == ';') {
          fields.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      fields.push_back(cur);
    }
    if (fields.size() != 4)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 'r;m;items;choice', got '" + line + "'");
    Observation obs;
    try {
      obs.round = std::stoi(fields[0]);
      int m = std::stoi(fields[1]);
      std::vector<int> items;
      std::string cur;
      for (char c : fields[2] + ",") {
        if (c == ',') {
          items.push_back(std::stoi(cur));
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (static_cast<int>(items.size()) != m)
        throw std::invalid_argument("menu size mismatch");
      obs.menu = Menu::of(items);
      if (obs.menu.items != items)
        throw std::invalid_argument("menu not in increasing order");
      obs.chosen = std::stoi(fields[3]);
    } catch (const std::exception& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            e.what() + " in '" + line + "'");
    }
    if (obs.round < 1)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": round must be positive");
    if (obs.menu.index_of(obs.chosen) < 0)
      throw ValidationError("line " + std::to_string(line_no) + ": choice " +
                            std::to_string(obs.chosen) + " not in menu " +
                            obs.menu.to_string());
    dataset.n = std::max(dataset.n, obs.menu.items.back());
    dataset.observations.push_back(std::move(obs));
  }
  if (dataset.observations.empty())
    throw ValidationError("dataset file '" + path + "' is empty");
  return dataset;
}

}  // namespace choicerank
