// choicerank: simulate choice data, recover top-K item sets, and evaluate
// the theory around generalised Borda scores.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure,
// 4 I/O failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "choicerank/choice_models.hpp"
#include "choicerank/core.hpp"
#include "choicerank/harness.hpp"
#include "choicerank/preflib.hpp"
#include "choicerank/rankers.hpp"
#include "choicerank/sampling.hpp"
#include "choicerank/theory.hpp"
#include "choicerank/verify.hpp"

namespace {

using namespace choicerank;

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError(std::string("bad ") + what + " entry '" + token +
                            "'");
    }
  }
  if (out.empty())
    throw ValidationError(std::string("empty ") + what + " list");
  return out;
}

std::vector<int> parse_ints(const std::string& csv, const char* what) {
  std::vector<int> out;
  for (double v : parse_doubles(csv, what)) {
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ValidationError(std::string(what) + " entries must be integers");
    out.push_back(i);
  }
  return out;
}

// Every run prints its fully resolved configuration to stderr so output
// files can always be traced back to their inputs.
class ConfigEcho {
 public:
  explicit ConfigEcho(const std::string& command) {
    std::cerr << "# command = " << command << "\n";
  }
  template <typename T>
  void add(const std::string& key, const T& value) {
    std::cerr << "# " << key << " = " << value << "\n";
  }
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CHOICE_RANK_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("CHOICE_RANK_THREADS='") + env +
                          "' is not a positive integer");
  }
  return 1;
}

// --------------------------------------------------------------------------
// Shared model specification: exactly one of --mnl-weights, --partworths
// (with --noise), or --tabular.

struct ModelSpec {
  std::string mnl_weights;
  std::string partworths;
  std::string noise = "gumbel";
  std::string tabular_path;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--mnl-weights", mnl_weights,
                    "MNL weights w1,w2,... (positive reals)");
    cmd->add_option("--partworths", partworths,
                    "partworths U1,U2,... for a parametric model");
    cmd->add_option("--noise", noise,
                    "noise family for --partworths: gumbel, normal or "
                    "exponential (default gumbel)");
    cmd->add_option("--tabular", tabular_path,
                    "tabular choice model file (m;items;probs lines)");
  }

  int spec_count() const {
    return (mnl_weights.empty() ? 0 : 1) + (partworths.empty() ? 0 : 1) +
           (tabular_path.empty() ? 0 : 1);
  }

  void require_one() const {
    if (spec_count() != 1)
      throw ValidationError(
          "specify exactly one of --mnl-weights, --partworths, --tabular");
  }

  bool is_tabular() const { return !tabular_path.empty(); }

  ParametricChoiceModel parametric(ConfigEcho& echo) const {
    ParametricChoiceModel model;
    if (!mnl_weights.empty()) {
      std::vector<double> w = parse_doubles(mnl_weights, "--mnl-weights");
      for (double x : w)
        if (!(x > 0.0))
          throw ValidationError("MNL weights must be positive");
      if (noise != "gumbel")
        throw ValidationError(
            "--mnl-weights fixes the noise family to gumbel; use "
            "--partworths with --noise for other families");
      std::vector<double> u(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) u[i] = std::log(w[i]);
      model.partworths = PartworthVector::of(std::move(u));
      model.noise = NoiseFamily::GumbelStandard;
      echo.add("model", "mnl-weights " + mnl_weights);
    } else {
      model.partworths =
          PartworthVector::of(parse_doubles(partworths, "--partworths"));
      model.noise = noise_from_string(noise);
      echo.add("model", "partworths " + partworths + " noise " + noise);
    }
    return model;
  }

  // Exact probability source; storage keeps a loaded tabular model alive.
  std::unique_ptr<ChoiceProbabilitySource> exact_source(
      std::unique_ptr<TabularChoiceModel>& storage, ConfigEcho& echo) const {
    if (is_tabular()) {
      storage = std::make_unique<TabularChoiceModel>(load_tabular(tabular_path));
      echo.add("model", "tabular " + tabular_path);
      echo.add("n", storage->n());
      return std::make_unique<TabularSource>(*storage);
    }
    ParametricChoiceModel model = parametric(echo);
    if (model.noise != NoiseFamily::GumbelStandard)
      throw ValidationError(
          "exact choice probabilities require an MNL model (gumbel noise); "
          "got noise family " + noise_to_string(model.noise));
    echo.add("n", model.n());
    return std::make_unique<MnlSource>(model.mnl_weights());
  }
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  return file;
}

// --------------------------------------------------------------------------

void echo_sampling(ConfigEcho& echo, const SamplingConfig& config,
                   int threads) {
  echo.add("n", config.n);
  echo.add("m", config.m);
  echo.add("p", format_double_exact(config.p));
  echo.add("R", config.R);
  echo.add("seed", config.seed);
  echo.add("threads", threads);
  std::uint64_t menus = binom(config.n, config.m);
  echo.add("menus_per_round", menus);
  echo.add("expected_samples", format_double_exact(expected_sample_size(config)));
  // Per-(round, menu) stream seeds are derived, not stored: round r
  // (1-based) and the menu with lexicographic rank t (0-based) use
  // mix_seed(seed, (r-1)*menus + t).
  echo.add("derived_stream_seed_first", mix_seed(config.seed, 0));
}

int cmd_simulate(const ModelSpec& spec, int m, double p, int R,
                 std::uint64_t seed, const std::string& out_path,
                 bool allow_large, int threads_flag) {
  ConfigEcho echo("simulate");
  SamplingConfig config;
  config.m = m;
  config.p = p;
  config.R = R;
  config.seed = seed;
  config.allow_large = allow_large;
  int threads = resolve_threads(threads_flag);

  ChoiceDataset dataset;
  if (spec.is_tabular()) {
    TabularChoiceModel model = load_tabular(spec.tabular_path);
    echo.add("model", "tabular " + spec.tabular_path);
    config.n = model.n();
    echo_sampling(echo, config, threads);
    dataset = simulate_dataset(model, config, threads);
  } else {
    ParametricChoiceModel model = spec.parametric(echo);
    config.n = model.n();
    echo_sampling(echo, config, threads);
    dataset = simulate_dataset(model, config, threads);
  }
  save_dataset(dataset, out_path);
  echo.add("observations", dataset.size());
  echo.add("out", out_path);
  return 0;
}

int cmd_rank(const ModelSpec& spec, const std::string& dataset_path, int m,
             int K, const std::string& algorithm_name,
             const std::string& out_path, double tol, std::int64_t max_iters,
             int threads_flag) {
  ConfigEcho echo("rank");
  Algorithm algorithm = algorithm_from_string(algorithm_name);
  echo.add("algorithm", algorithm_name);
  echo.add("K", K);
  int threads = resolve_threads(threads_flag);
  MleOptions mle_options;
  mle_options.gradient_tolerance = tol;
  mle_options.max_iters = max_iters;

  std::vector<double> scores;
  if (!dataset_path.empty()) {
    if (spec.spec_count() != 0)
      throw ValidationError(
          "--dataset and a model specification are mutually exclusive");
    ChoiceDataset dataset = load_dataset(dataset_path);
    echo.add("dataset", dataset_path);
    echo.add("n", dataset.n);
    echo.add("observations", dataset.size());
    switch (algorithm) {
      case Algorithm::Borda:
        scores = borda_count(dataset);
        break;
      case Algorithm::Mle: {
        MleResult fit =
            mle_fit(AggregatedChoiceData::from_dataset(dataset), mle_options);
        echo.add("mle_iterations", fit.iterations);
        echo.add("mle_residual", format_double_exact(fit.residual));
        scores = fit.u_hat;
        break;
      }
      case Algorithm::Spectral: {
        // Reuse the guarded path (pair coverage + irreducibility checks).
        auto chain = build_markov_chain_empirical(dataset);
        if (chain.damped) echo.add("spectral_damped", "true");
        scores = stationary_distribution(chain.M);
        break;
      }
    }
    if (algorithm == Algorithm::Spectral) {
      // The coverage check lives in spectral_topk; run it for its
      // diagnostics before trusting the scores above.
      spectral_topk(dataset, K);
    }
  } else {
    spec.require_one();
    if (m < 2) throw ValidationError("exact mode needs --m >= 2");
    std::unique_ptr<TabularChoiceModel> storage;
    auto source = spec.exact_source(storage, echo);
    echo.add("m", m);
    echo.add("mode", "exact probabilities");
    switch (algorithm) {
      case Algorithm::Borda:
        scores = borda_scores_exact(*source, m, threads).tau;
        break;
      case Algorithm::Mle: {
        MleResult fit =
            mle_fit(AggregatedChoiceData::from_probs(*source, m), mle_options);
        echo.add("mle_iterations", fit.iterations);
        echo.add("mle_residual", format_double_exact(fit.residual));
        scores = fit.u_hat;
        break;
      }
      case Algorithm::Spectral: {
        auto chain = build_markov_chain(*source, m);
        scores = stationary_distribution(chain.M);
        break;
      }
    }
  }

  std::vector<int> order = order_by_score_desc(scores);
  std::vector<int> ranks(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r] - 1] = static_cast<int>(r + 1);

  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  out << "item,score,rank\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    out << (i + 1) << ',' << format_double_exact(scores[i]) << ',' << ranks[i]
        << '\n';

  if (K < 1 || K > static_cast<int>(scores.size()))
    throw ValidationError("K must be in [1," + std::to_string(scores.size()) +
                          "], got " + std::to_string(K));
  // Top-K line, best first.
  for (int r = 0; r < K; ++r) {
    if (r) std::cout << ' ';
    std::cout << order[r];
  }
  std::cout << '\n';
  return 0;
}

int cmd_theory(const ModelSpec& spec, const std::string& m_list_csv,
               const std::string& k_list_csv, int h,
               const std::string& convention_name, const std::string& out_path,
               int threads_flag) {
  ConfigEcho echo("theory");
  spec.require_one();
  std::vector<int> m_list = parse_ints(m_list_csv, "--m-list");
  std::vector<int> k_list = parse_ints(k_list_csv, "--k-list");
  GapIndexConvention convention;
  if (convention_name == "k-minus-h")
    convention = GapIndexConvention::KMinusH;
  else if (convention_name == "k-minus-h-minus-1")
    convention = GapIndexConvention::KMinusHMinusOne;
  else
    throw ValidationError("--convention must be k-minus-h or "
                          "k-minus-h-minus-1");
  int threads = resolve_threads(threads_flag);

  std::unique_ptr<TabularChoiceModel> storage;
  auto source = spec.exact_source(storage, echo);
  echo.add("m_list", m_list_csv);
  echo.add("k_list", k_list_csv);
  echo.add("h", h);
  echo.add("convention", convention_name);

  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  out << "m,K,delta_K,factor_one,factor_two,bound_exact,bound_approx\n";
  for (int m : m_list) {
    BordaScores scores = borda_scores_exact(*source, m, threads);
    for (int K : k_list) {
      GapReport report = gap_report(scores, K, h, convention);
      if (report.nonpositive_gap)
        throw ValidationError("Delta_K is not positive at m = " +
                              std::to_string(m) + ", K = " + std::to_string(K) +
                              "; bounds are undefined");
      double exact_bound = exact_recovery_bound(scores, K);
      double approx_bound = approx_recovery_bound(scores, K, h, convention);
      out << m << ',' << K << ',' << format_double_exact(report.delta_k) << ','
          << format_double_exact(report.factor_one) << ','
          << format_double_exact(report.factor_two) << ','
          << format_double_exact(exact_bound) << ','
          << format_double_exact(approx_bound) << '\n';
    }
  }
  return 0;
}

int cmd_ingest(const std::string& input, int m, const std::string& out_model,
               const std::string& out_truth) {
  ConfigEcho echo("ingest");
  RankingDataset rankings = parse_rankings(input);
  echo.add("input", input);
  echo.add("n", rankings.n);
  echo.add("records", rankings.records.size());
  echo.add("total_rankings", rankings.total_rankings);
  echo.add("m", m);

  TabularChoiceModel model = empirical_choice_probs(rankings, m);
  save_tabular(model, out_model);
  echo.add("out_model", out_model);

  GroundTruth truth = ground_truth_ordering(rankings);
  save_ordering(truth.order, out_truth);
  echo.add("out_truth", out_truth);
  return 0;
}

ExperimentConfig parse_experiment_file(const std::string& path,
                                       std::string& mode,
                                       std::string& tabular_path,
                                       std::string& truth_path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = line;
    if (auto hash = t.find('#'); hash != std::string::npos) t = t.substr(0, hash);
    auto strip = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      std::size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    t = strip(t);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" + t + "'");
    std::string key = strip(t.substr(0, eq));
    std::string value = strip(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": duplicate key '" + key + "'");
  }

  ExperimentConfig config;
  mode = "synthetic";
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto v = take("mode")) mode = *v;
  if (auto v = take("n")) config.n = std::stoi(*v);
  if (auto v = take("m_list")) config.m_list = parse_ints(*v, "m_list");
  if (auto v = take("k_list")) config.k_list = parse_ints(*v, "k_list");
  if (auto v = take("budgets")) config.budgets = parse_doubles(*v, "budgets");
  if (auto v = take("trials")) config.trials = std::stoi(*v);
  if (auto v = take("r")) config.R = std::stoi(*v);
  if (auto v = take("seed")) config.seed = std::stoull(*v);
  if (auto v = take("timing")) config.timing = (*v == "true" || *v == "1");
  if (auto v = take("threads")) config.threads = std::stoi(*v);
  if (auto v = take("noise")) config.noise = noise_from_string(*v);
  if (auto v = take("partworths"))
    config.partworths = parse_doubles(*v, "partworths");
  if (auto v = take("partworth_seed")) config.partworth_seed = std::stoull(*v);
  if (auto v = take("mnl_weights")) {
    std::vector<double> w = parse_doubles(*v, "mnl_weights");
    std::vector<double> u(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!(w[i] > 0.0))
        throw ValidationError("mnl_weights must be positive");
      u[i] = std::log(w[i]);
    }
    config.partworths = std::move(u);
    config.noise = NoiseFamily::GumbelStandard;
  }
  if (auto v = take("algorithms")) {
    config.algorithms.clear();
    std::stringstream ss(*v);
    std::string token;
    while (std::getline(ss, token, ','))
      config.algorithms.push_back(algorithm_from_string(token));
  }
  if (auto v = take("tabular")) tabular_path = *v;
  if (auto v = take("truth")) truth_path = *v;
  if (!kv.empty())
    throw ValidationError("unknown config key '" + kv.begin()->first + "'");
  return config;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   int threads_flag) {
  ConfigEcho echo("experiment");
  std::string mode, tabular_path, truth_path;
  ExperimentConfig config =
      parse_experiment_file(config_path, mode, tabular_path, truth_path);
  if (threads_flag > 0) config.threads = threads_flag;
  else if (config.threads <= 0) config.threads = resolve_threads(0);

  echo.add("config", config_path);
  echo.add("mode", mode);
  echo.add("seed", config.seed);
  echo.add("trials", config.trials);
  echo.add("R", config.R);
  echo.add("threads", config.threads);
  echo.add("timing", config.timing ? "on" : "off (median_time_s column is 0)");

  std::vector<ResultRow> rows;
  if (mode == "synthetic") {
    if (config.partworth_seed)
      echo.add("partworth_seed", *config.partworth_seed);
    for (int m : config.m_list)
      echo.add("trial_seed_base_m" + std::to_string(m),
               mix_seed(config.seed, static_cast<std::uint64_t>(m)));
    rows = run_synthetic(config);
  } else if (mode == "real") {
    if (tabular_path.empty() || truth_path.empty())
      throw ValidationError("real mode needs 'tabular' and 'truth' paths");
    TabularChoiceModel model = load_tabular(tabular_path);
    std::vector<int> truth = load_ordering(truth_path);
    echo.add("tabular", tabular_path);
    echo.add("truth", truth_path);
    for (int m : config.m_list)
      echo.add("trial_seed_base_m" + std::to_string(m),
               mix_seed(config.seed, static_cast<std::uint64_t>(m)));
    rows = run_real(model, truth, config);
  } else {
    throw ValidationError("mode must be synthetic or real, got '" + mode + "'");
  }

  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  write_results_csv(rows, out);
  return 0;
}

int cmd_verify(std::uint64_t seed, double perturb_kl) {
  ConfigEcho echo("verify");
  echo.add("seed", seed);
  if (perturb_kl != 0.0) echo.add("dev_perturb_kl", perturb_kl);
  VerifyOptions options;
  options.seed = seed;
  options.kl_perturbation = perturb_kl;
  std::vector<CheckResult> checks = run_verification_suite(options);
  bool all_passed = true;
  for (const auto& check : checks) {
    std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name
              << "  residual=" << format_double_exact(check.residual) << "  ("
              << check.detail << ")\n";
    all_passed = all_passed && check.passed;
  }
  std::cout << (all_passed ? "all checks passed" : "CHECKS FAILED") << "\n";
  if (!all_passed)
    throw NumericalError("verification suite failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"top-K item recovery from discrete choice data"};
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "draw a choice dataset");
  ModelSpec sim_spec;
  sim_spec.add_flags(sim);
  int sim_m = 0, sim_R = 1, sim_threads = 0;
  double sim_p = 1.0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  bool sim_allow_large = false;
  sim->add_option("--m", sim_m, "menu size")->required();
  sim->add_option("--p", sim_p, "offer probability in (0,1] (default 1)");
  sim->add_option("--R", sim_R, "number of rounds (default 1)");
  sim->add_option("--seed", sim_seed, "random seed (default 0)");
  sim->add_option("--out", sim_out, "output dataset path (.gz for gzip)")
      ->required();
  sim->add_flag("--allow-large", sim_allow_large,
                "lift the R*C(n,m) <= 1e9 guard");
  sim->add_option("--threads", sim_threads,
                  "worker threads (default: CHOICE_RANK_THREADS or 1)");

  // rank -------------------------------------------------------------------
  auto* rank = app.add_subcommand("rank", "score items and report the top K");
  ModelSpec rank_spec;
  rank_spec.add_flags(rank);
  std::string rank_dataset, rank_algorithm, rank_out;
  int rank_m = 0, rank_k = 0, rank_threads = 0;
  double rank_tol = 1e-8;
  std::int64_t rank_max_iters = 100000;
  rank->add_option("--dataset", rank_dataset,
                   "dataset file (r;m;items;choice lines, .gz ok)");
  rank->add_option("--m", rank_m, "menu size for exact mode");
  rank->add_option("--algorithm", rank_algorithm, "borda, mle or spectral")
      ->required();
  rank->add_option("--k", rank_k, "top-K size")->required();
  rank->add_option("--out", rank_out, "scores CSV path (default stdout)");
  rank->add_option("--tol", rank_tol, "MLE gradient tolerance (default 1e-8)");
  rank->add_option("--max-iters", rank_max_iters,
                   "MLE iteration limit (default 1e5)");
  rank->add_option("--threads", rank_threads,
                   "worker threads (default: CHOICE_RANK_THREADS or 1)");

  // theory -----------------------------------------------------------------
  auto* theory = app.add_subcommand(
      "theory", "Borda gaps and sample-complexity bounds for a model");
  ModelSpec theory_spec;
  theory_spec.add_flags(theory);
  std::string theory_m_list, theory_k_list, theory_out;
  std::string theory_convention = "k-minus-h";
  int theory_h = 0, theory_threads = 0;
  // This subcommand takes --h (the approximation slack), which CLI11 would
  // otherwise reject as clashing with the default -h help alias.
  theory->set_help_flag("--help", "print help");
  theory->add_option("--m-list", theory_m_list, "menu sizes, e.g. 2,3,4")
      ->required();
  theory->add_option("--k-list", theory_k_list, "top-K sizes, e.g. 1,3")
      ->required();
  theory->add_option("--h", theory_h, "approximation slack (default 0)");
  theory->add_option("--convention", theory_convention,
                     "Delta_{K,h} index convention: k-minus-h (default) or "
                     "k-minus-h-minus-1");
  theory->add_option("--out", theory_out, "CSV path (default stdout)");
  theory->add_option("--threads", theory_threads,
                     "worker threads (default: CHOICE_RANK_THREADS or 1)");

  // ingest -----------------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "convert ranking data to a tabular model and ground truth");
  std::string ingest_input, ingest_out_model, ingest_out_truth;
  int ingest_m = 0;
  ingest->add_option("--input", ingest_input, "ranking file")->required();
  ingest->add_option("--m", ingest_m, "menu size for choice probabilities")
      ->required();
  ingest->add_option("--out-model", ingest_out_model, "tabular model path")
      ->required();
  ingest->add_option("--out-truth", ingest_out_truth,
                     "ground-truth ordering CSV path")
      ->required();

  // experiment ---------------------------------------------------------------
  auto* experiment = app.add_subcommand(
      "experiment", "accuracy-vs-samples grids from a config file");
  std::string experiment_config, experiment_out;
  int experiment_threads = 0;
  experiment->add_option("--config", experiment_config, "key = value config file")
      ->required();
  experiment->add_option("--out", experiment_out, "CSV path (default stdout)");
  experiment->add_option("--threads", experiment_threads,
                         "worker threads (default: config file, "
                         "CHOICE_RANK_THREADS or 1)");

  // verify -------------------------------------------------------------------
  auto* verify = app.add_subcommand(
      "verify", "run the closed-form identity and equivalence checks");
  std::uint64_t verify_seed = 20250817;
  double verify_perturb = 0.0;
  verify->add_option("--seed", verify_seed, "suite seed");
  verify
      ->add_option("--dev-perturb-kl", verify_perturb,
                   "perturb the compact KL constant (development: forces the "
                   "identity check to fail)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
    if (sim->parsed())
      return cmd_simulate(sim_spec, sim_m, sim_p, sim_R, sim_seed, sim_out,
                          sim_allow_large, sim_threads);
    if (rank->parsed())
      return cmd_rank(rank_spec, rank_dataset, rank_m, rank_k, rank_algorithm,
                      rank_out, rank_tol, rank_max_iters, rank_threads);
    if (theory->parsed())
      return cmd_theory(theory_spec, theory_m_list, theory_k_list, theory_h,
                        theory_convention, theory_out, theory_threads);
    if (ingest->parsed())
      return cmd_ingest(ingest_input, ingest_m, ingest_out_model,
                        ingest_out_truth);
    if (experiment->parsed())
      return cmd_experiment(experiment_config, experiment_out,
                            experiment_threads);
    if (verify->parsed()) return cmd_verify(verify_seed, verify_perturb);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
