// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion also carries a wall-clock budget that is
// part of the pass condition.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"
#include "choicerank/harness.hpp"
#include "choicerank/preflib.hpp"
#include "choicerank/rankers.hpp"
#include "choicerank/sampling.hpp"
#include "choicerank/theory.hpp"

using namespace choicerank;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, double limit_s,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  auto started = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - started;
  if (elapsed.count() >= limit_s) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  if (!ok) ++g_failures;
  std::printf("%s  criterion %2d: %s  (%.2fs%s%s)\n", ok ? "PASS" : "FAIL",
              number, label.c_str(), elapsed.count(),
              detail.empty() ? "" : "; ", detail.c_str());
  std::fflush(stdout);
}

bool same_order(const std::vector<double>& a, const std::vector<double>& b) {
  return order_by_score_desc(a) == order_by_score_desc(b);
}

// Random proper tabular model: independent Dirichlet(2) probabilities on
// every size-m menu. Shape 2 keeps draws away from the simplex boundary so
// the MLE stays well conditioned.
TabularChoiceModel random_tabular(int n, int m, Rng& rng) {
  TabularChoiceModel model(n);
  for (MenuEnumerator e(n, m); e.valid(); e.advance()) {
    std::vector<double> probs(m);
    double sum = 0.0;
    for (double& q : probs) {
      q = -std::log(rng.uniform01()) - std::log(rng.uniform01());
      sum += q;
    }
    for (double& q : probs) q /= sum;
    model.set_menu(e.current(), probs, ProbabilityHandling::Strict);
  }
  return model;
}

std::vector<double> random_weights(int n, Rng& rng) {
  std::vector<double> w(n);
  for (double& x : w) x = std::exp(rng.normal());
  return w;
}

}  // namespace

int main() {
  // 1. On the 4x4 pairwise table, counting and MLE order items 4,3,2,1
  //    while the spectral chain orders them 4,2,3,1.
  criterion(1, "counterexample divergence", 1.0, [](std::string& detail) {
    auto model = tabular_from_matrix(counterexample_matrix(),
                                     ProbabilityHandling::FaceValue);
    TabularSource source(model);
    std::vector<int> want_counting = {4, 3, 2, 1};
    std::vector<int> want_spectral = {4, 2, 3, 1};

    auto borda_order = order_by_score_desc(borda_scores_exact(source, 2).tau);
    MleResult fit = mle_fit(AggregatedChoiceData::from_probs(source, 2));
    auto mle_order = order_by_score_desc(fit.u_hat);
    auto chain = build_markov_chain(source, 2);
    auto spectral_order = order_by_score_desc(stationary_distribution(chain.M));

    if (borda_order != want_counting) {
      detail = "borda order wrong";
      return false;
    }
    if (mle_order != want_counting) {
      detail = "mle order wrong";
      return false;
    }
    if (spectral_order != want_spectral) {
      detail = "spectral order wrong";
      return false;
    }
    return true;
  });

  // 2. On exact probabilities from random tabular models, the MLE ordering
  //    equals the Borda-score ordering on every instance.
  criterion(2, "borda/mle equivalence on 50 random tabular models", 60.0,
            [](std::string& detail) {
              Rng rng(20250817);
              MleOptions options;
              options.gradient_tolerance = 1e-8;
              options.max_iters = 2000000;
              for (int inst = 0; inst < 50; ++inst) {
                int n = 4 + inst % 5;
                int m = 2 + inst % 2;
                TabularChoiceModel model = random_tabular(n, m, rng);
                TabularSource source(model);
                auto tau = borda_scores_exact(source, m).tau;
                MleResult fit = mle_fit(
                    AggregatedChoiceData::from_probs(source, m), options);
                if (fit.residual > 1e-8) {
                  detail = "instance " + std::to_string(inst) +
                           ": residual above 1e-8";
                  return false;
                }
                if (!same_order(tau, fit.u_hat)) {
                  detail = "instance " + std::to_string(inst) +
                           ": orderings differ";
                  return false;
                }
              }
              return true;
            });

  // 3. Exact spectral chains on MNL models order items by weight.
  criterion(3, "spectral consistency on 20 random MNL instances", 30.0,
            [](std::string& detail) {
              Rng rng(7);
              for (int inst = 0; inst < 20; ++inst) {
                int n = 3 + inst % 6;
                int m = 2 + inst % (n - 1);
                auto w = random_weights(n, rng);
                auto chain = build_markov_chain(MnlSource(w), m);
                auto pi = stationary_distribution(chain.M);
                if (!same_order(pi, w)) {
                  detail = "instance " + std::to_string(inst) +
                           ": stationary order differs from weights";
                  return false;
                }
              }
              return true;
            });

  // 4. The compact KL expression equals the brute-force menu sum.
  criterion(4, "KL compact identity on 30 planted pairs", 30.0,
            [](std::string& detail) {
              Rng rng(11);
              for (int inst = 0; inst < 30; ++inst) {
                int n = 4 + inst % 7;
                int m = 2 + inst % 3;
                int K = 1 + inst % (n - 1);
                int a = K;
                int b = K + 1 + inst % (n - K);
                double v = 1.0 + rng.uniform01();
                double delta = 0.1 + rng.uniform01();
                double p = 0.25 + 0.5 * rng.uniform01();
                int R = 1 + inst % 3;
                KlPair kl = kl_special_pair(n, m, K, v, delta, p, R, a, b);
                if (std::abs(kl.compact - kl.brute_force) >
                    1e-9 * std::abs(kl.brute_force)) {
                  detail = "instance " + std::to_string(inst) +
                           ": identity violated";
                  return false;
                }
              }
              return true;
            });

  // 5. Closed-form sandwich brackets the exact scaled gap m*(tau_i - tau_j).
  criterion(5, "sandwich bounds on 200 random MNL instances", 60.0,
            [](std::string& detail) {
              Rng rng(13);
              for (int inst = 0; inst < 200; ++inst) {
                int n = 3 + inst % 6;
                int m = 2 + inst % (n - 1);
                auto w = random_weights(n, rng);
                int i = 1 + inst % n;
                int j = 1 + (i + inst) % n;
                if (i == j) j = 1 + j % n;
                if (w[i - 1] < w[j - 1]) std::swap(i, j);
                SandwichBounds sb = mnl_gap_sandwich(w, i, j, m);
                double slack = 1e-12 * std::max(1.0, std::abs(sb.exact));
                if (!(sb.lower <= sb.exact + slack) ||
                    !(sb.exact <= sb.upper + slack)) {
                  detail = "instance " + std::to_string(inst) +
                           ": bracket violated";
                  return false;
                }
              }
              return true;
            });

  // 6. (tau_K + tau_{K+1}) / Delta_K^2 equals the max of (tau_i + tau_j) /
  //    (tau_i - tau_j)^2 over i in the top K and j outside.
  criterion(6, "boundary-pair identity on 100 exact score vectors", 10.0,
            [](std::string& detail) {
              Rng rng(17);
              for (int inst = 0; inst < 100; ++inst) {
                int n = 4 + inst % 7;
                int m = 2 + inst % 3;
                int K = 1 + inst % (n - 1);
                auto tau = borda_scores_exact(MnlSource(random_weights(n, rng)),
                                              m).tau;
                std::vector<double> s = tau;
                std::sort(s.begin(), s.end(), std::greater<>());
                double lhs = (s[K - 1] + s[K]) /
                             ((s[K - 1] - s[K]) * (s[K - 1] - s[K]));
                double rhs = 0.0;
                for (int hi = 0; hi < K; ++hi)
                  for (int lo = K; lo < n; ++lo) {
                    double d = s[hi] - s[lo];
                    rhs = std::max(rhs, (s[hi] + s[lo]) / (d * d));
                  }
                if (std::abs(lhs - rhs) >
                    1e-12 * std::max({1.0, lhs, rhs})) {
                  detail = "instance " + std::to_string(inst) +
                           ": identity off";
                  return false;
                }
              }
              return true;
            });

  // 7. Both bound factors fall as menus grow, convexly in most instances.
  criterion(7, "menu-size monotonicity at n = 15, K = 3", 300.0,
            [](std::string& detail) {
              int convex_instances = 0;
              for (std::uint64_t seed = 101; seed <= 105; ++seed) {
                Rng rng(seed);
                std::vector<double> u(15);
                for (double& x : u) x = rng.normal();
                ParametricChoiceModel model;
                model.partworths = PartworthVector::of(u);
                MnlSource source(model.mnl_weights());

                std::vector<double> f1, f2;
                for (int m = 2; m <= 8; ++m) {
                  auto scores = borda_scores_exact(source, m);
                  GapReport report = gap_report(scores, 3);
                  if (report.nonpositive_gap) {
                    detail = "seed " + std::to_string(seed) + ": zero gap";
                    return false;
                  }
                  f1.push_back(report.factor_one);
                  f2.push_back(report.factor_two);
                }
                for (std::size_t t = 1; t < f1.size(); ++t)
                  if (!(f1[t] < f1[t - 1]) || !(f2[t] < f2[t - 1])) {
                    detail = "seed " + std::to_string(seed) +
                             ": not strictly decreasing";
                    return false;
                  }
                bool convex = true;
                for (std::size_t t = 2; t < f1.size(); ++t) {
                  if (!(f1[t] - 2 * f1[t - 1] + f1[t - 2] > 0)) convex = false;
                  if (!(f2[t] - 2 * f2[t - 1] + f2[t - 2] > 0)) convex = false;
                }
                if (convex) ++convex_instances;
              }
              if (convex_instances < 4) {
                detail = "positive second differences in only " +
                         std::to_string(convex_instances) + " of 5";
                return false;
              }
              return true;
            });

  // 8. Synthetic top-K recovery: near-certain at the top budget, and larger
  //    menus do not hurt at the mid budget.
  criterion(8, "synthetic recovery at n = 20", 600.0,
            [](std::string& detail) {
              ExperimentConfig config;
              config.n = 20;
              config.m_list = {2, 4};
              config.k_list = {1, 3};
              config.budgets = {2000.0, 8000.0, 30000.0};
              config.trials = 20;
              config.R = 200;
              config.seed = 20250817;
              config.algorithms = {Algorithm::Borda};
              config.threads = 4;
              std::vector<double> u = {2.4, 1.6, 1.4, 0.6};
              for (int k = 0; k < 16; ++k) u.push_back(0.55 - k * (0.55 / 15.0));
              config.partworths = u;

              auto rows = run_synthetic(config);
              auto accuracy_at = [&](int m, int K, double budget) {
                for (const auto& row : rows)
                  if (row.m == m && row.K == K && row.expected_samples == budget)
                    return row.accuracy;
                return -1.0;
              };
              for (int K : {1, 3})
                for (int m : {2, 4})
                  if (accuracy_at(m, K, 30000.0) < 0.95) {
                    detail = "accuracy below 0.95 at m = " + std::to_string(m) +
                             ", K = " + std::to_string(K);
                    return false;
                  }
              for (int K : {1, 3})
                if (accuracy_at(4, K, 8000.0) <
                    accuracy_at(2, K, 8000.0) - 0.1) {
                  detail = "menu size 4 underperforms at the mid budget, K = " +
                           std::to_string(K);
                  return false;
                }
              return true;
            });

  // 9. Analytic likelihood gradient matches central finite differences, and
  //    the two-item fit lands on the logit closed form.
  criterion(9, "MLE gradient and two-item closed form", 30.0,
            [](std::string& detail) {
              Rng rng(23);
              for (int inst = 0; inst < 50; ++inst) {
                int n = 3 + inst % 4;
                SamplingConfig sc;
                sc.n = n;
                sc.m = 2 + inst % 2;
                sc.p = 1.0;
                sc.R = 20;
                sc.seed = 1000 + inst;
                ParametricChoiceModel model;
                std::vector<double> true_u(n);
                for (double& x : true_u) x = 0.5 * rng.normal();
                model.partworths = PartworthVector::of(true_u);
                auto agg = AggregatedChoiceData::from_dataset(
                    simulate_dataset(model, sc));

                std::vector<double> u(n);
                for (double& x : u) x = 0.5 * rng.normal();
                auto lv = mnl_log_likelihood(u, agg);
                const double h = 1e-6;
                for (int k = 0; k < n; ++k) {
                  std::vector<double> up = u, down = u;
                  up[k] += h;
                  down[k] -= h;
                  double fd = (mnl_log_likelihood(up, agg).value -
                               mnl_log_likelihood(down, agg).value) /
                              (2 * h);
                  if (std::abs(fd - lv.gradient[k]) >
                      1e-6 * std::max(1.0, std::abs(lv.gradient[k]))) {
                    detail = "instance " + std::to_string(inst) +
                             ": gradient mismatch";
                    return false;
                  }
                }
              }

              // two items, empirical win rate 2/3
              ChoiceDataset data;
              data.n = 2;
              Menu pair = Menu::of({1, 2});
              data.observations.push_back({1, pair, 1});
              data.observations.push_back({2, pair, 1});
              data.observations.push_back({3, pair, 2});
              MleResult fit =
                  mle_fit(AggregatedChoiceData::from_dataset(data));
              double gap = fit.u_hat[0] - fit.u_hat[1];
              if (std::abs(gap - std::log(2.0)) > 1e-6) {
                detail = "two-item gap is not ln 2";
                return false;
              }
              return true;
            });

  // 10. Fractional wins from tied rankings reproduce hand-computed menu
  //     probabilities exactly.
  criterion(10, "fractional-win ingestion of a tied corpus", 1.0,
            [](std::string& detail) {
              const char* corpus =
                  "# NUMBER ALTERNATIVES: 4\n"
                  "2: 1,2,3,4\n"
                  "1: {1,2},3,4\n"
                  "1: 3,{2,4},1\n"
                  "1: 4,{1,2,3}\n"
                  "1: 2,1\n";  // short ballot: 3 and 4 share the bottom
              std::string path = "/tmp/choicerank_acceptance_corpus.txt";
              {
                std::ofstream out(path);
                out << corpus;
              }
              RankingDataset rankings = parse_rankings(path);
              TabularChoiceModel pairs = empirical_choice_probs(rankings, 2);
              // units of 1/2 per ranking, 6 rankings: denominator 12
              struct Want {
                int i, j;
                double pi, pj;
              };
              std::vector<Want> wants = {
                  {1, 2, 6.0 / 12.0, 6.0 / 12.0},
                  {1, 3, 9.0 / 12.0, 3.0 / 12.0},
                  {1, 4, 8.0 / 12.0, 4.0 / 12.0},
                  {2, 3, 9.0 / 12.0, 3.0 / 12.0},
                  {2, 4, 9.0 / 12.0, 3.0 / 12.0},
                  {3, 4, 9.0 / 12.0, 3.0 / 12.0},
              };
              for (const auto& want : wants) {
                Menu menu = Menu::of({want.i, want.j});
                if (pairs.prob(menu, want.i) != want.pi ||
                    pairs.prob(menu, want.j) != want.pj) {
                  detail = "pair {" + std::to_string(want.i) + "," +
                           std::to_string(want.j) + "} off";
                  return false;
                }
              }
              // units of 1/6 per ranking for triples: denominator 36
              TabularChoiceModel triples = empirical_choice_probs(rankings, 3);
              Menu trio = Menu::of({1, 2, 3});
              if (triples.prob(trio, 1) != 17.0 / 36.0 ||
                  triples.prob(trio, 2) != 11.0 / 36.0 ||
                  triples.prob(trio, 3) != 8.0 / 36.0) {
                detail = "triple {1,2,3} off";
                return false;
              }
              return true;
            });

  // 11. Counting is at least 10x faster than the MLE on a large dataset.
  criterion(11, "borda vs mle timing at 121800 observations", 300.0,
            [](std::string& detail) {
              Rng rng(29);
              std::vector<double> u(30);
              for (double& x : u) x = 0.5 * rng.normal();
              ParametricChoiceModel model;
              model.partworths = PartworthVector::of(u);
              SamplingConfig sc;
              sc.n = 30;
              sc.m = 3;
              sc.p = 1.0;
              sc.R = 30;
              sc.seed = 31;
              auto data = simulate_dataset(model, sc, 4);
              if (data.size() < 100000) {
                detail = "dataset too small";
                return false;
              }
              auto rows =
                  time_algorithms(data, {Algorithm::Borda, Algorithm::Mle}, 5);
              double borda_t = rows[0].median_time_s;
              double mle_t = rows[1].median_time_s;
              char buf[96];
              std::snprintf(buf, sizeof buf, "borda %.4fs, mle %.4fs",
                            borda_t, mle_t);
              detail = buf;
              return borda_t <= mle_t / 10.0;
            });

  std::printf("%s\n", g_failures == 0 ? "all criteria passed"
                                      : "ACCEPTANCE FAILURES");
  return g_failures == 0 ? 0 : 1;
}
