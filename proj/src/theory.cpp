#include "choicerank/theory.hpp"

#include <cmath>
#include <numeric>

namespace choicerank {

BordaScores borda_scores_exact(const ChoiceProbabilitySource& source, int m,
                               int threads) {
  int n = source.item_count();
  if (m < 2 || m > n)
    throw ValidationError("menu size m must satisfy 2 <= m <= n, got m = " +
                          std::to_string(m) + " with n = " + std::to_string(n));
  std::uint64_t total = binom(n, m);
  if (total > 10000000ULL)
    throw ValidationError("C(" + std::to_string(n) + "," + std::to_string(m) +
                          ") = " + std::to_string(total) +
                          " menus exceeds the exact enumeration limit of 1e7");

  // Fixed chunking (independent of the thread count) plus pairwise merging
  // keeps the floating-point result identical no matter how the work is
  // spread over threads.
  int chunks = total >= 128 ? 64 : 1;
  std::uint64_t per = total / chunks;
  std::uint64_t extra = total % chunks;

  std::vector<std::vector<double>> partial(chunks,
                                           std::vector<double>(n, 0.0));
  parallel_for_chunks(chunks, threads, [&](int c) {
    std::uint64_t begin =
        c * per + std::min<std::uint64_t>(c, extra);
    std::uint64_t count = per + (static_cast<std::uint64_t>(c) < extra ? 1 : 0);
    MenuEnumerator menus(n, m);
    if (begin > 0) menus.seek(begin);
    std::vector<double>& acc = partial[c];
    std::vector<double> probs(m);
    for (std::uint64_t t = 0; t < count; ++t, menus.advance()) {
      const Menu& s = menus.current();
      source.menu_probs(s, probs);
      for (int k = 0; k < m; ++k) acc[s.items[k] - 1] += probs[k];
    }
  });

  for (int width = 1; width < chunks; width *= 2)
    for (int c = 0; c + width < chunks; c += 2 * width)
      for (int i = 0; i < n; ++i) partial[c][i] += partial[c + width][i];

  BordaScores scores;
  scores.m = m;
  scores.exact = true;
  scores.tau = std::move(partial[0]);
  double denom = static_cast<double>(binom(n - 1, m - 1));
  for (double& t : scores.tau) t /= denom;
  // Self-check: the scores of a proper model sum to n/m because every
  // menu's probabilities sum to 1. Face-value sources are exempt.
  if (source.normalized()) {
    double sum = std::accumulate(scores.tau.begin(), scores.tau.end(), 0.0);
    double expect = static_cast<double>(n) / m;
    if (std::abs(sum - expect) > 1e-10 * expect)
      throw NumericalError("Borda scores sum to " + format_double_exact(sum) +
                           ", expected n/m = " + format_double_exact(expect));
  }
  return scores;
}

BordaScores borda_scores_mc(const ParametricChoiceModel& model, int m,
                            std::int64_t menus_per_item,
                            std::int64_t draws_per_menu, std::uint64_t seed) {
  int n = model.n();
  if (m < 2 || m > n)
    throw ValidationError("menu size m must satisfy 2 <= m <= n");
  if (menus_per_item < 1 || draws_per_menu < 1)
    throw ValidationError("Monte Carlo sample counts must be positive");

  BordaScores scores;
  scores.m = m;
  scores.exact = false;
  scores.menus_per_item = menus_per_item;
  scores.draws_per_menu = draws_per_menu;
  scores.tau.assign(n, 0.0);
  scores.std_error.assign(n, 0.0);

  for (int item = 1; item <= n; ++item) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(item)));
    std::vector<int> others;
    others.reserve(n - 1);
    for (int k = 1; k <= n; ++k)
      if (k != item) others.push_back(k);

    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<int> menu_items(m);
    for (std::int64_t t = 0; t < menus_per_item; ++t) {
      // Uniform (m-1)-subset of the other items by partial Fisher-Yates.
      for (int k = 0; k < m - 1; ++k) {
        int span = static_cast<int>(others.size()) - k;
        int pick = k + static_cast<int>(rng.uniform01() * span);
        if (pick >= static_cast<int>(others.size()))
          pick = static_cast<int>(others.size()) - 1;
        std::swap(others[k], others[pick]);
        menu_items[k] = others[k];
      }
      menu_items[m - 1] = item;
      std::sort(menu_items.begin(), menu_items.end());
      Menu menu(menu_items);

      std::int64_t wins = 0;
      for (std::int64_t d = 0; d < draws_per_menu; ++d)
        if (sample_choice(model, menu, rng) == item) ++wins;
      double rate = static_cast<double>(wins) / draws_per_menu;
      sum += rate;
      sum_sq += rate * rate;
    }
    double mean = sum / menus_per_item;
    scores.tau[item - 1] = mean;
    if (menus_per_item > 1) {
      double var = (sum_sq - menus_per_item * mean * mean) /
                   (menus_per_item - 1);
      scores.std_error[item - 1] =
          std::sqrt(std::max(0.0, var) / menus_per_item);
    } else {
      scores.std_error[item - 1] = std::sqrt(
          mean * (1.0 - mean) / static_cast<double>(draws_per_menu));
    }
  }
  return scores;
}

namespace {

std::vector<double> sorted_desc(const std::vector<double>& tau) {
  std::vector<double> s = tau;
  std::sort(s.begin(), s.end(), std::greater<double>());
  return s;
}

double delta_kh_value(const std::vector<double>& s, int K, int h,
                      GapIndexConvention convention, int n) {
  if (h < 0) throw ValidationError("h must be nonnegative");
  if (K - h < 1 || K + h + 1 > n)
    throw ValidationError("h = " + std::to_string(h) +
                          " needs 1 <= K-h and K+h+1 <= n (K = " +
                          std::to_string(K) + ", n = " + std::to_string(n) + ")");
  int left;
  switch (convention) {
    case GapIndexConvention::KMinusH:
      left = K - h;
      break;
    case GapIndexConvention::KMinusHMinusOne:
      left = K - h - 1;
      if (left < 1)
        throw ValidationError(
            "K-h-1 convention needs K - h >= 2, got K = " + std::to_string(K) +
            ", h = " + std::to_string(h));
      break;
    default:
      throw ValidationError("unknown gap index convention");
  }
  return s[left - 1] - s[K + h];
}

}  // namespace

GapReport gap_report(const BordaScores& scores, int K, std::optional<int> h,
                     GapIndexConvention convention) {
  int n = scores.n();
  if (K < 1 || K >= n)
    throw ValidationError("K must be in [1, n-1], got K = " + std::to_string(K) +
                          " with n = " + std::to_string(n));
  std::vector<double> s = sorted_desc(scores.tau);
  GapReport report;
  report.K = K;
  report.m = scores.m;
  report.delta_k = s[K - 1] - s[K];
  report.nonpositive_gap = !(report.delta_k > 0.0);
  if (!report.nonpositive_gap) {
    report.factor_one = 1.0 / (scores.m * report.delta_k);
    report.factor_two = s[K] / report.delta_k;
  }
  if (h) report.delta_kh = delta_kh_value(s, K, *h, convention, n);
  return report;
}

double exact_recovery_bound(const BordaScores& scores, int K) {
  int n = scores.n();
  if (K < 1 || K >= n)
    throw ValidationError("K must be in [1, n-1]");
  std::vector<double> s = sorted_desc(scores.tau);
  double delta = s[K - 1] - s[K];
  if (!(delta > 0.0))
    throw ValidationError("recovery bound undefined: Delta_K = " +
                          format_double_exact(delta) + " is not positive");
  return (8.0 * n * std::log(static_cast<double>(n)) /
          (scores.m * delta * delta)) *
         (delta + 2.0 * s[K]);
}

double approx_recovery_bound(const BordaScores& scores, int K, int h,
                             GapIndexConvention convention) {
  int n = scores.n();
  if (K < 1 || K >= n)
    throw ValidationError("K must be in [1, n-1]");
  std::vector<double> s = sorted_desc(scores.tau);
  double delta = delta_kh_value(s, K, h, convention, n);
  if (!(delta > 0.0))
    throw ValidationError("recovery bound undefined: Delta_{K,h} = " +
                          format_double_exact(delta) + " is not positive");
  return (8.0 * n * std::log(static_cast<double>(n)) / (scores.m * delta)) *
         (1.0 + s[K + h] / delta);
}

SandwichBounds mnl_gap_sandwich(const std::vector<double>& weights, int i,
                                int j, int m) {
  int n = static_cast<int>(weights.size());
  if (n < 3)
    throw ValidationError("gap sandwich needs n >= 3 items");
  if (m < 2 || m > n)
    throw ValidationError("menu size m must satisfy 2 <= m <= n");
  if (i < 1 || i > n || j < 1 || j > n || i == j)
    throw ValidationError("need two distinct items in [1,n]");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("MNL weights must be positive and finite");
  double wi = weights[i - 1];
  double wj = weights[j - 1];
  if (!(wi > wj))
    throw ValidationError("gap sandwich needs w_i > w_j, got w_" +
                          std::to_string(i) + " = " + format_double_exact(wi) +
                          ", w_" + std::to_string(j) + " = " +
                          format_double_exact(wj));

  SandwichBounds out;

  MnlSource source(weights);
  BordaScores scores = borda_scores_exact(source, m);
  out.exact = m * (scores.tau[i - 1] - scores.tau[j - 1]);

  double ratio = static_cast<double>(n) / (n - 1);
  double wmax = *std::max_element(weights.begin(), weights.end());
  double wmin = *std::min_element(weights.begin(), weights.end());

  {
    // Upper bound, valid at the normalisation w_min = 1.
    double a = wi / wmin;
    double b = wj / wmin;
    double top = wmax / wmin;
    out.upper = (a - b) * ratio *
                (1.0 - (b - 1.0) / (m - 1.0 + b)) *
                (1.0 - (a / top) / (m - 1.0 + a / top));
  }
  {
    // Lower bound, valid when the other n-2 weights average to 1.
    double others = 0.0;
    for (int k = 1; k <= n; ++k)
      if (k != i && k != j) others += weights[k - 1];
    double c = static_cast<double>(n - 2) / others;
    double a = c * wi;
    double b = c * wj;
    double bottom = c * wmin;
    out.lower = (a - b) * ratio *
                (1.0 - a / (m - 1.0 + a)) *
                (1.0 - (b / bottom) / (m - 1.0 + b / bottom));
  }
  return out;
}

KlPair kl_special_pair(int n, int m, int K, double v, double delta, double p,
                       int R, int a, int b) {
  if (n < 2 || m < 2 || m > n)
    throw ValidationError("need 2 <= m <= n");
  if (K < 1 || K >= n)
    throw ValidationError("K must be in [1, n-1]");
  if (!(v > 0.0) || !(delta > 0.0))
    throw ValidationError("need v > 0 and delta > 0");
  if (!(p > 0.0 && p <= 1.0))
    throw ValidationError("offer probability p must be in (0,1]");
  if (R < 1) throw ValidationError("round count R must be positive");
  if (a < K || a > n || b < K || b > n)
    throw ValidationError("planted indices a, b must lie in [K, n]");
  if (a == b) return {0.0, 0.0};

  auto planted = [&](int top_item) {
    std::vector<int> top_set;
    for (int k = 1; k < K; ++k) top_set.push_back(k);
    top_set.push_back(top_item);
    return hard_instance_mnl(n, K, v, delta, top_set);
  };
  std::vector<double> wa = planted(a);
  std::vector<double> wb = planted(b);

  KlPair out;

  // Brute force: the offered-menu indicator has the same law under both
  // models, so the divergence is p * R times the sum over menus of the KL
  // between the conditional choice distributions.
  MnlSource sa(wa);
  MnlSource sb(wb);
  double sum = 0.0;
  MenuEnumerator menus(n, m);
  std::vector<double> pa(m), pb(m);
  for (; menus.valid(); menus.advance()) {
    sa.menu_probs(menus.current(), pa);
    sb.menu_probs(menus.current(), pb);
    for (int k = 0; k < m; ++k) sum += pa[k] * std::log(pa[k] / pb[k]);
  }
  out.brute_force = p * R * sum;

  // Closed form via the Borda gap of the first instance.
  BordaScores scores = borda_scores_exact(sa, m);
  std::vector<double> s = sorted_desc(scores.tau);
  double gap = s[K - 1] - s[K];
  out.compact = p * R * std::log((v + delta) / v) *
                binom_real(n - 1, m - 1) * gap;
  return out;
}

ConsistencyReport check_borda_consistency(const BordaScores& scores,
                                          const std::vector<double>& partworths) {
  int n = scores.n();
  if (static_cast<int>(partworths.size()) != n)
    throw ValidationError("expected " + std::to_string(n) +
                          " partworths, got " +
                          std::to_string(partworths.size()));
  ConsistencyReport report;
  bool mc = !scores.std_error.empty();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (partworths[i] == partworths[j]) continue;
      int hi = partworths[i] > partworths[j] ? i : j;
      int lo = hi == i ? j : i;
      double diff = scores.tau[hi] - scores.tau[lo];
      if (mc) {
        double pooled = std::hypot(scores.std_error[hi], scores.std_error[lo]);
        if (std::abs(diff) <= 4.0 * pooled) {
          ++report.skipped;
          continue;
        }
      }
      ++report.adjudicated;
      if (!(diff > 0.0)) {
        report.consistent = false;
        report.violations.emplace_back(hi + 1, lo + 1);
      }
    }
  }
  return report;
}

}  // namespace choicerank
