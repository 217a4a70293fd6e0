#include "choicerank/rankers.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace choicerank {

std::vector<double> borda_count(const ChoiceDataset& dataset) {
  dataset.validate();
  if (dataset.observations.empty())
    throw ValidationError("cannot rank an empty dataset");
  std::vector<double> counts(dataset.n, 0.0);
  for (const auto& obs : dataset.observations) counts[obs.chosen - 1] += 1.0;
  return counts;
}

std::vector<int> borda_topk(const ChoiceDataset& dataset, int K) {
  return top_k_items(borda_count(dataset), K);
}

AggregatedChoiceData AggregatedChoiceData::from_dataset(
    const ChoiceDataset& dataset) {
  dataset.validate();
  if (dataset.observations.empty())
    throw ValidationError("cannot aggregate an empty dataset");
  std::map<Menu, std::vector<double>> wins;
  for (const auto& obs : dataset.observations) {
    auto [it, fresh] =
        wins.try_emplace(obs.menu, std::vector<double>(obs.menu.size(), 0.0));
    it->second[obs.menu.index_of(obs.chosen)] += 1.0;
  }
  AggregatedChoiceData data;
  data.n = dataset.n;
  data.appearance.assign(dataset.n, 0.0);
  data.blocks.reserve(wins.size());
  for (auto& [menu, w] : wins) {
    MenuBlock block;
    block.menu = menu;
    block.total = std::accumulate(w.begin(), w.end(), 0.0);
    block.wins = std::move(w);
    for (int item : block.menu.items)
      data.appearance[item - 1] += block.total;
    data.blocks.push_back(std::move(block));
  }
  return data;
}

AggregatedChoiceData AggregatedChoiceData::from_probs(
    const ChoiceProbabilitySource& source, int m) {
  int n = source.item_count();
  AggregatedChoiceData data;
  data.n = n;
  data.appearance.assign(n, 0.0);
  MenuEnumerator menus(n, m);
  data.blocks.reserve(binom(n, m));
  std::vector<double> probs(m);
  for (; menus.valid(); menus.advance()) {
    MenuBlock block;
    block.menu = menus.current();
    source.menu_probs(block.menu, probs);
    block.wins.assign(probs.begin(), probs.end());
    block.total = 1.0;
    for (int item : block.menu.items) data.appearance[item - 1] += 1.0;
    data.blocks.push_back(std::move(block));
  }
  return data;
}

void AggregatedChoiceData::check_connected() const {
  for (int i = 0; i < n; ++i)
    if (appearance[i] == 0.0)
      throw ValidationError("item " + std::to_string(i + 1) +
                            " never appears in any observed menu");
  // Union-find over items; chaining consecutive menu members is enough to
  // merge each menu into one component.
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& block : blocks)
    for (int k = 1; k < block.menu.size(); ++k) {
      int a = find(block.menu.items[k - 1]);
      int b = find(block.menu.items[k]);
      if (a != b) parent[a] = b;
    }
  int root = find(1);
  for (int i = 2; i <= n; ++i) {
    if (find(i) != root) {
      std::string members;
      for (int j = 1; j <= n; ++j)
        if (find(j) == find(i)) members += (members.empty() ? "" : ",") +
                                           std::to_string(j);
      throw ValidationError(
          "comparison graph is disconnected: items {" + members +
          "} share no menu with the rest, so their scale is not identified");
    }
  }
}

LikelihoodValue mnl_log_likelihood(const std::vector<double>& partworths,
                                   const AggregatedChoiceData& data) {
  if (static_cast<int>(partworths.size()) != data.n)
    throw ValidationError("expected " + std::to_string(data.n) +
                          " partworths, got " +
                          std::to_string(partworths.size()));
  LikelihoodValue out;
  out.gradient.assign(data.n, 0.0);
  std::vector<double> soft;
  for (const auto& block : data.blocks) {
    int m = block.menu.size();
    soft.resize(m);
    double umax = -HUGE_VAL;
    for (int k = 0; k < m; ++k)
      umax = std::max(umax, partworths[block.menu.items[k] - 1]);
    double z = 0.0;
    for (int k = 0; k < m; ++k) {
      soft[k] = std::exp(partworths[block.menu.items[k] - 1] - umax);
      z += soft[k];
    }
    double lse = umax + std::log(z);
    // value = sum wins_k U_k - total * lse, so the gradient below is its
    // exact derivative. For datasets sum(wins) == total and this equals the
    // usual per-observation log-likelihood; for exact-probability blocks
    // the block weight is 1 whether or not the stored p(.|S) sums to 1.
    for (int k = 0; k < m; ++k) {
      int item = block.menu.items[k];
      double p = soft[k] / z;
      out.value += block.wins[k] * partworths[item - 1];
      out.gradient[item - 1] += block.wins[k] - block.total * p;
    }
    out.value -= block.total * lse;
  }
  return out;
}

namespace {

double scaled_residual(const std::vector<double>& gradient,
                       const std::vector<double>& appearance) {
  double r = 0.0;
  for (std::size_t i = 0; i < gradient.size(); ++i)
    r = std::max(r, std::abs(gradient[i]) / std::max(1.0, appearance[i]));
  return r;
}

void center(std::vector<double>& u) {
  double mean = std::accumulate(u.begin(), u.end(), 0.0) /
                static_cast<double>(u.size());
  for (double& x : u) x -= mean;
}

}  // namespace

MleResult mle_fit(const AggregatedChoiceData& data, const MleOptions& options) {
  if (options.gradient_tolerance <= 0.0)
    throw ValidationError("gradient tolerance must be positive");
  data.check_connected();

  std::vector<double> u(data.n, 0.0);
  LikelihoodValue cur = mnl_log_likelihood(u, data);
  double step = 1.0 / std::max(
      1.0, std::accumulate(data.appearance.begin(), data.appearance.end(), 0.0) /
               static_cast<double>(data.n));

  // The likelihood is optimized over the zero-sum subspace (sum U = 0), so
  // both the ascent direction and the convergence test use the gradient
  // projected onto that subspace. For per-menu win vectors that sum to the
  // block totals the projection is a no-op (the raw gradient already sums
  // to zero); it matters only for face-value probability blocks.
  std::vector<double> direction(data.n);
  auto project = [&](const std::vector<double>& g) {
    direction = g;
    center(direction);
  };

  MleResult result;
  std::vector<double> prev_u, prev_g;
  std::vector<double> candidate(data.n);
  for (std::int64_t iter = 0; iter < options.max_iters; ++iter) {
    project(cur.gradient);
    result.residual = scaled_residual(direction, data.appearance);
    if (result.residual <= options.gradient_tolerance) {
      result.u_hat = u;
      result.iterations = iter;
      result.log_likelihood = cur.value;
      return result;
    }
    double g2 = 0.0;
    for (double g : direction) g2 += g * g;

    // Trial step: the Barzilai-Borwein spectral step when history exists
    // (it adapts to the local curvature, which plain steepest ascent
    // handles poorly on ill-conditioned instances), otherwise twice the
    // last accepted step. Armijo backtracking below keeps either choice
    // safe.
    if (!prev_u.empty()) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < data.n; ++i) {
        double s = u[i] - prev_u[i];
        double y = direction[i] - prev_g[i];
        ss += s * s;
        sy += s * y;
      }
      double bb = ss / -sy;  // sy < 0 for a concave objective
      if (std::isfinite(bb) && bb > 0.0) step = std::min(bb, 1e12);
      else step *= 2.0;
    } else {
      step *= 2.0;
    }

    prev_u = u;
    prev_g = direction;
    LikelihoodValue next;
    std::vector<double> next_direction(data.n);
    while (true) {
      for (int i = 0; i < data.n; ++i)
        candidate[i] = u[i] + step * direction[i];
      next = mnl_log_likelihood(candidate, data);
      // The slack term absorbs roundoff in the two likelihood values: on
      // large datasets the sufficient-decrease margin near the optimum is
      // below one ulp of the likelihood.
      double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                     (std::abs(cur.value) + std::abs(next.value));
      if (next.value >= cur.value + options.armijo_c * step * g2 - slack)
        break;
      // Near the optimum of a large dataset every achievable improvement is
      // below one ulp of the likelihood, so the Armijo test goes blind. The
      // gradient stays accurately computable there; accepting on a strict
      // gradient-norm decrease keeps driving the stationarity residual
      // down, and monotone norms rule out cycling.
      next_direction = next.gradient;
      center(next_direction);
      double next_g2 = 0.0;
      for (double g : next_direction) next_g2 += g * g;
      if (next_g2 <= 0.999 * g2) break;
      step *= options.backtrack_factor;
      if (step < 1e-300)
        throw NumericalError(
            "MLE line search collapsed; final scaled residual " +
            format_double_exact(result.residual));
    }
    u = candidate;
    center(u);
    // Recompute at the centered point: the likelihood is shift-invariant
    // only in exact arithmetic, and carrying the uncentered value makes the
    // next Armijo test compare two subtly different base points.
    cur = mnl_log_likelihood(u, data);
  }
  project(cur.gradient);
  result.residual = scaled_residual(direction, data.appearance);
  throw NumericalError("MLE did not converge in " +
                       std::to_string(options.max_iters) +
                       " iterations; final scaled residual " +
                       format_double_exact(result.residual));
}

std::vector<int> mle_topk(const ChoiceDataset& dataset, int K,
                          const MleOptions& options) {
  MleResult fit = mle_fit(AggregatedChoiceData::from_dataset(dataset), options);
  return top_k_items(fit.u_hat, K);
}

// ---------------------------------------------------------------------------
// Spectral ranking.

namespace {

void validate_chain(SquareMatrix& M) {
  for (int i = 0; i < M.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < M.n; ++j) {
      double v = M.at(i, j);
      if (v < 0.0) {
        // Tiny negatives are floating-point residue from the 1 - sum
        // diagonal; anything larger means a broken construction.
        if (v < -1e-12)
          throw NumericalError("Markov chain entry (" + std::to_string(i + 1) +
                               "," + std::to_string(j + 1) +
                               ") is negative: " + format_double_exact(v));
        M.at(i, j) = 0.0;
        v = 0.0;
      }
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw NumericalError("Markov chain row " + std::to_string(i + 1) +
                           " sums to " + format_double_exact(row));
  }
}

}  // namespace

MarkovChainResult build_markov_chain(const ChoiceProbabilitySource& source,
                                     int m) {
  int n = source.item_count();
  if (m < 2 || m > n)
    throw ValidationError("menu size m must satisfy 2 <= m <= n");
  MarkovChainResult result;
  result.M = SquareMatrix(n);
  double scale = 1.0 / binom_real(n - 1, m - 1);
  MenuEnumerator menus(n, m);
  std::vector<double> probs(m);
  for (; menus.valid(); menus.advance()) {
    const Menu& s = menus.current();
    source.menu_probs(s, probs);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a != b)
          result.M.at(s.items[a] - 1, s.items[b] - 1) += scale * probs[b];
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += result.M.at(i, j);
    if (off > 1.0 + 1e-9)
      throw NumericalError("row " + std::to_string(i + 1) +
                           " off-diagonal mass " + format_double_exact(off) +
                           " exceeds 1 in exact chain");
    result.M.at(i, i) = 1.0 - off;
  }
  validate_chain(result.M);
  return result;
}

MarkovChainResult build_markov_chain_empirical(const ChoiceDataset& dataset) {
  dataset.validate();
  int n = dataset.n;
  int m = dataset.menu_size();

  // Observed win fractions per menu.
  std::map<Menu, std::pair<std::vector<double>, double>> stats;
  for (const auto& obs : dataset.observations) {
    auto [it, fresh] = stats.try_emplace(
        obs.menu, std::vector<double>(obs.menu.size(), 0.0), 0.0);
    it->second.first[obs.menu.index_of(obs.chosen)] += 1.0;
    it->second.second += 1.0;
  }

  auto assemble = [&](double scale_for_row) {
    SquareMatrix M(n);
    for (const auto& [menu, wins_total] : stats) {
      const auto& wins = wins_total.first;
      double total = wins_total.second;
      for (int a = 0; a < menu.size(); ++a)
        for (int b = 0; b < menu.size(); ++b)
          if (a != b)
            M.at(menu.items[a] - 1, menu.items[b] - 1) +=
                scale_for_row * wins[b] / total;
    }
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) off += M.at(i, j);
      M.at(i, i) = 1.0 - off;
    }
    return M;
  };

  MarkovChainResult result;
  result.M = assemble(1.0 / binom_real(n - 1, m - 1));
  bool negative = false;
  for (int i = 0; i < n && !negative; ++i)
    if (result.M.at(i, i) < 0.0) negative = true;
  if (negative) {
    // Inconsistent empirical input (more observed menus per item than the
    // nominal C(n-1,m-1)); fall back to the conservative damping that keeps
    // rows substochastic: divide by twice the maximum menu degree.
    std::vector<int> degree(n, 0);
    for (const auto& [menu, unused] : stats)
      for (int item : menu.items) ++degree[item - 1];
    int dmax = *std::max_element(degree.begin(), degree.end());
    result.M = assemble(1.0 / (2.0 * dmax));
    result.damped = true;
  }
  validate_chain(result.M);
  return result;
}

std::vector<double> stationary_distribution(const SquareMatrix& M, double tol,
                                            std::int64_t max_iters) {
  int n = M.n;
  if (n < 1) throw ValidationError("empty transition matrix");
  {
    SquareMatrix copy = M;
    validate_chain(copy);
  }

  // Irreducibility: every state reachable from state 1 and vice versa on
  // the positive-transition graph.
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        double edge = forward ? M.at(i, j) : M.at(j, i);
        if (j != i && edge > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return seen;
  };
  auto fwd = reach(true);
  auto bwd = reach(false);
  for (int j = 0; j < n; ++j) {
    if (!fwd[j])
      throw ValidationError("chain is reducible: state " +
                            std::to_string(j + 1) +
                            " is unreachable from state 1");
    if (!bwd[j])
      throw ValidationError("chain is reducible: state 1 is unreachable from state " +
                            std::to_string(j + 1));
  }

  std::vector<double> pi(n, 1.0 / n);
  std::vector<double> next(n);
  for (std::int64_t iter = 0; iter < max_iters; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      double w = pi[i];
      if (w == 0.0) continue;
      for (int j = 0; j < n; ++j) next[j] += w * M.at(i, j);
    }
    double mass = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& x : next) x /= mass;
    double residual = 0.0;
    for (int j = 0; j < n; ++j) residual += std::abs(next[j] - pi[j]);
    pi.swap(next);
    if (residual <= tol) return pi;
  }
  throw NumericalError("power iteration did not reach tolerance " +
                       format_double_exact(tol) + " in " +
                       std::to_string(max_iters) + " iterations");
}

std::vector<int> spectral_topk(const ChoiceProbabilitySource& source, int m,
                               int K) {
  auto chain = build_markov_chain(source, m);
  return top_k_items(stationary_distribution(chain.M), K);
}

std::vector<int> spectral_topk(const ChoiceDataset& dataset, int K) {
  // The empirical chain only makes sense when every pair has been compared
  // somewhere; otherwise whole blocks of the matrix are structurally zero.
  int n = dataset.n;
  std::vector<char> covered(static_cast<std::size_t>(n) * n, 0);
  for (const auto& obs : dataset.observations)
    for (int a : obs.menu.items)
      for (int b : obs.menu.items)
        covered[static_cast<std::size_t>(a - 1) * n + (b - 1)] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (!covered[static_cast<std::size_t>(i - 1) * n + (j - 1)])
        throw ValidationError("items " + std::to_string(i) + " and " +
                              std::to_string(j) +
                              " never appear in a common observed menu");
  auto chain = build_markov_chain_empirical(dataset);
  return top_k_items(stationary_distribution(chain.M), K);
}

}  // namespace choicerank
