#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <compare>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace choicerank {

// Error categories. The CLI maps these onto exit codes, so keep the
// distinction meaningful: ValidationError for bad inputs or domain
// violations, NumericalError for algorithms that fail to converge or
// produce inconsistent intermediate state, IoError for file trouble.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Random numbers.
//
// Reproducibility across platforms and compilers matters more here than raw
// speed, so the generator and every variate transform are pinned explicitly
// rather than delegated to <random> distributions (whose output is
// implementation-defined). The generator is splitmix64 (Steele, Lea, Vigna),
// a 64-bit generator that passes BigCrush and costs a handful of ops per
// draw; its tiny state also makes the per-stream seeding used by the
// sampler cheap.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, index). Used to give each
// simulation round / menu draw / trial its own stream so that parallel and
// sequential execution produce identical output.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
  return splitmix64_next(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform on the open interval (0,1): 53-bit mantissa offset by half an
  // ulp so the endpoints are unreachable and log()/log(-log()) stay finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard Gumbel via inverse CDF.
  double gumbel() { return -std::log(-std::log(uniform01())); }

  // Unit-rate exponential via inverse CDF.
  double exponential() { return -std::log(uniform01()); }

  // Standard normal via Box-Muller (cosine branch, two uniforms per draw).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Binomial coefficients, exact.

// C(n,k) in exact 64-bit integer arithmetic; throws ValidationError on
// overflow. The multiply-then-divide loop keeps every intermediate an exact
// integer because the running product of j consecutive terms is divisible
// by j!.
std::uint64_t binom(int n, int k);

// C(n,k) as a double: exact value when it fits in 64 bits, otherwise via
// lgamma. Only used where a real-valued count is acceptable (expected
// sample sizes, bounds).
double binom_real(int n, int k);

// ---------------------------------------------------------------------------
// Menus.

// A menu is a set of 1-based item indices, stored strictly increasing.
// Size must be at least 2: a one-item menu gives the chooser no choice.
struct Menu {
  std::vector<int> items;

  Menu() = default;
  explicit Menu(std::vector<int> sorted_items) : items(std::move(sorted_items)) {}

  // Validating constructor: sorts, rejects duplicates, out-of-range ids and
  // menus smaller than 2. Pass n_items = 0 to skip the upper range check.
  static Menu of(std::vector<int> raw, int n_items = 0);

  int size() const { return static_cast<int>(items.size()); }
  bool contains(int item) const {
    return std::binary_search(items.begin(), items.end(), item);
  }
  // Position of item inside the menu, -1 if absent.
  int index_of(int item) const {
    auto it = std::lower_bound(items.begin(), items.end(), item);
    if (it == items.end() || *it != item) return -1;
    return static_cast<int>(it - items.begin());
  }

  auto operator<=>(const Menu&) const = default;

  std::string to_string() const;
};

// Lazy lexicographic enumeration of all m-subsets of {1..n}. O(m) state.
// Usage:
//   MenuEnumerator e(n, m);
//   while (e.valid()) { const Menu& s = e.current(); ...; e.advance(); }
class MenuEnumerator {
 public:
  MenuEnumerator(int n, int m);

  bool valid() const { return valid_; }
  const Menu& current() const { return current_; }
  void advance();

  // Jump to the combination with the given lexicographic rank (0-based).
  void seek(std::uint64_t rank);

 private:
  int n_;
  int m_;
  bool valid_;
  Menu current_;
};

// All menus of size m containing `item`, lexicographic, materialised.
// Count is C(n-1, m-1); caller is responsible for keeping that small.
std::vector<Menu> menus_containing(int n, int m, int item);

// ---------------------------------------------------------------------------
// Small utilities shared across modules.

// Formats a double with enough digits to round-trip exactly (17 significant
// digits, %g style).
std::string format_double_exact(double x);

// Ordering of items (1-based) by descending score; ties broken towards the
// lower index. scores[i] is the score of item i+1.
std::vector<int> order_by_score_desc(const std::vector<double>& scores);

// The K best items under the same ordering rule, returned sorted ascending
// (set semantics).
std::vector<int> top_k_items(const std::vector<double>& scores, int k);

// Runs fn(chunk_index) for chunk_index in [0, chunks) on up to `threads`
// worker threads. fn must be safe to call concurrently for distinct chunks.
void parallel_for_chunks(int chunks, int threads,
                         const std::function<void(int)>& fn);

}  // namespace choicerank
