#include "choicerank/core.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <thread>

namespace choicerank {

std::uint64_t binom(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (int j = 1; j <= k; ++j) {
    std::uint64_t num = static_cast<std::uint64_t>(n - k + j);
    std::uint64_t den = static_cast<std::uint64_t>(j);
    // Reduce before multiplying so intermediates stay exact as long as the
    // result fits. After dividing out g = gcd(c, j), the leftover j/g is
    // coprime to c/g, and since c*num/j is an integer (it is C(n-k+j, j)
    // scaled), j/g must divide num.
    std::uint64_t g = std::gcd(c, den);
    c /= g;
    num /= den / g;
    if (c > UINT64_MAX / num)
      throw ValidationError("binomial coefficient overflows 64 bits: C(" +
                            std::to_string(n) + "," + std::to_string(k) + ")");
    c *= num;
  }
  return c;
}

double binom_real(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (n <= 62) return static_cast<double>(binom(n, k));
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

Menu Menu::of(std::vector<int> raw, int n_items) {
  if (raw.size() < 2)
    throw ValidationError("menu must contain at least 2 items, got " +
                          std::to_string(raw.size()));
  std::sort(raw.begin(), raw.end());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 1)
      throw ValidationError("menu item indices are 1-based, got " +
                            std::to_string(raw[i]));
    if (i > 0 && raw[i] == raw[i - 1])
      throw ValidationError("menu contains duplicate item " +
                            std::to_string(raw[i]));
    if (n_items > 0 && raw[i] > n_items)
      throw ValidationError("menu item " + std::to_string(raw[i]) +
                            " exceeds item count " + std::to_string(n_items));
  }
  return Menu(std::move(raw));
}

std::string Menu::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(items[i]);
  }
  s += "}";
  return s;
}

MenuEnumerator::MenuEnumerator(int n, int m) : n_(n), m_(m) {
  if (m < 2) throw ValidationError("menu size must be at least 2, got " +
                                   std::to_string(m));
  if (n < m) throw ValidationError("cannot enumerate menus of size " +
                                   std::to_string(m) + " from " +
                                   std::to_string(n) + " items");
  current_.items.resize(m);
  std::iota(current_.items.begin(), current_.items.end(), 1);
  valid_ = true;
}

void MenuEnumerator::advance() {
  // Standard odometer step for combinations in lexicographic order.
  auto& v = current_.items;
  int i = m_ - 1;
  while (i >= 0 && v[i] == n_ - m_ + 1 + i) --i;
  if (i < 0) {
    valid_ = false;
    return;
  }
  ++v[i];
  for (int j = i + 1; j < m_; ++j) v[j] = v[j - 1] + 1;
}

void MenuEnumerator::seek(std::uint64_t rank) {
  // Combinatorial unranking: choose each element greedily by how many
  // combinations start with a smaller value.
  auto& v = current_.items;
  valid_ = true;
  int lo = 1;
  for (int pos = 0; pos < m_; ++pos) {
    int remaining = m_ - pos - 1;
    int x = lo;
    while (true) {
      std::uint64_t block = binom(n_ - x, remaining);
      if (rank < block) break;
      rank -= block;
      ++x;
      if (x > n_ - remaining) {
        valid_ = false;
        return;
      }
    }
    v[pos] = x;
    lo = x + 1;
  }
}

std::vector<Menu> menus_containing(int n, int m, int item) {
  if (item < 1 || item > n)
    throw ValidationError("item " + std::to_string(item) +
                          " outside universe of " + std::to_string(n));
  std::vector<Menu> result;
  result.reserve(binom(n - 1, m - 1));
  // Enumerate (m-1)-subsets of {1..n}\{item} lexicographically and insert
  // the fixed item in sorted position; the map preserves lexicographic
  // order of the full menus.
  std::vector<int> others;
  others.reserve(n - 1);
  for (int i = 1; i <= n; ++i)
    if (i != item) others.push_back(i);
  int k = m - 1;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  int nn = n - 1;
  while (true) {
    std::vector<int> menu(m);
    for (int j = 0; j < k; ++j) menu[j] = others[idx[j]];
    menu[k] = item;
    std::inplace_merge(menu.begin(), menu.begin() + k, menu.end());
    result.emplace_back(std::move(menu));
    int i = k - 1;
    while (i >= 0 && idx[i] == nn - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return result;
}

std::string format_double_exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<int> order_by_score_desc(const std::vector<double>& scores) {
  std::vector<int> items(scores.size());
  std::iota(items.begin(), items.end(), 1);
  std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
    return scores[a - 1] > scores[b - 1];
  });
  return items;
}

std::vector<int> top_k_items(const std::vector<double>& scores, int k) {
  int n = static_cast<int>(scores.size());
  if (k < 1 || k > n)
    throw ValidationError("K must be in [1," + std::to_string(n) + "], got " +
                          std::to_string(k));
  std::vector<int> order = order_by_score_desc(scores);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

void parallel_for_chunks(int chunks, int threads,
                         const std::function<void(int)>& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || chunks <= 1) {
    for (int c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  int workers = std::min(threads, chunks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        int c = next.fetch_add(1);
        if (c >= chunks) return;
        try {
          fn(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace choicerank
