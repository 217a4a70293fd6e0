#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "choicerank/core.hpp"

namespace choicerank {

// ---------------------------------------------------------------------------
// Random-utility choice models with i.i.d. noise.
//
// An item i has a deterministic partworth U_i; a chooser facing menu S
// observes X_i = U_i + eps_i with eps i.i.d. across items and picks the
// argmax. The noise family determines the induced choice probabilities;
// for standard Gumbel noise they collapse to the multinomial logit
//   p(i|S) = w_i / sum_{k in S} w_k,   w_k = exp(U_k).

enum class NoiseFamily { GumbelStandard, NormalStandard, ExponentialUnit };

NoiseFamily noise_from_string(const std::string& name);
std::string noise_to_string(NoiseFamily family);

struct PartworthVector {
  std::vector<double> values;  // values[i] is U_{i+1}

  static PartworthVector of(std::vector<double> values);

  int n() const { return static_cast<int>(values.size()); }
  // True iff all partworths are pairwise distinct. Degenerate vectors are
  // legal models; the flag exists so ranking code can tell when an order
  // is only defined up to ties.
  bool non_degenerate() const;
};

struct ParametricChoiceModel {
  PartworthVector partworths;
  NoiseFamily noise = NoiseFamily::GumbelStandard;

  int n() const { return partworths.n(); }
  // exp(U), the MNL weights. Meaningful as choice weights only under
  // Gumbel noise but harmless to compute for any model.
  std::vector<double> mnl_weights() const;
};

// MNL choice probability p(item|menu) for positive finite weights.
double mnl_choice_prob(const std::vector<double>& weights, const Menu& menu,
                       int item);

// One simulated choice from the model on the given menu: draws one noise
// realisation per menu item and returns the utility argmax. Exact ties
// (possible only through floating-point coincidence) go to the lowest item
// index.
int sample_choice(const ParametricChoiceModel& model, const Menu& menu,
                  Rng& rng);

// Monte Carlo estimate of p(item|menu) with its binomial standard error.
struct McEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};
McEstimate mc_choice_prob(const ParametricChoiceModel& model, const Menu& menu,
                          int item, std::int64_t num_samples, Rng& rng);

// ---------------------------------------------------------------------------
// Tabular models: explicit p(.|S) for an explicit set of menus. Used for
// models that are not (or not known to be) RUMs, e.g. empirical choice
// frequencies from ranking data.

// How strictly per-menu probability vectors are validated. Strict demands a
// probability simplex. FaceValue accepts any nonnegative finite vector with
// positive mass: some published pairwise instances state "probability of i
// over j" figures that do not sum to 1 per menu, and the divergence results
// about them only hold when the figures are used exactly as given.
enum class ProbabilityHandling { Strict, FaceValue };

class TabularChoiceModel {
 public:
  TabularChoiceModel() = default;
  explicit TabularChoiceModel(int n_items);

  int n() const { return n_; }

  // Installs the probability vector for a menu; probs aligned with
  // menu.items. Strict handling (the default) validates the simplex
  // constraints (nonnegative, sum 1 within 1e-12); FaceValue stores any
  // nonnegative finite vector with positive total.
  void set_menu(const Menu& menu, std::vector<double> probs,
                ProbabilityHandling handling = ProbabilityHandling::Strict);

  bool has_menu(const Menu& menu) const;
  const std::vector<double>& menu_probs(const Menu& menu) const;
  double prob(const Menu& menu, int item) const;

  const std::map<Menu, std::vector<double>>& menus() const { return table_; }

  // True iff every stored vector sums to 1 within 1e-12. Improper models
  // still rank (scores read the stored values as given) but cannot be
  // sampled from directly; the simulator rejection-samples them instead.
  bool proper() const;

  // Largest per-menu total; 1 for proper models. The simulator divides all
  // win masses by max(1, this) so each menu's masses fit in a probability.
  double max_menu_total() const;

  // Common menu size when all stored menus have one, e.g. a model holding
  // exactly the C(n,2) pairs has menu_size() == 2.
  std::optional<int> uniform_menu_size() const;

 private:
  int n_ = 0;
  std::map<Menu, std::vector<double>> table_;
};

// Builds a pairwise tabular model from an n-by-n matrix P where P[i][j] is
// the probability that j is chosen from {i,j}; equivalently the probability
// of choosing i from {i,j} is P[j][i] (1-based indices here), and column
// sums of P give pairwise Borda win counts.
// Entries must lie in [0,1] with a 0.5 diagonal. Strict handling (the
// default) additionally requires P_ij + P_ji = 1 within 1e-9 off the
// diagonal; FaceValue skips that check and stores the entries as given,
// yielding an improper model when pairs do not sum to 1.
TabularChoiceModel tabular_from_matrix(
    const std::vector<std::vector<double>>& P,
    ProbabilityHandling handling = ProbabilityHandling::Strict);

// The 4-item pairwise instance on which Borda/MLE and spectral ranking
// provably disagree; see docs. Entry (i,j) is the probability that j is
// chosen from {i,j} (tabular_from_matrix orientation). Note the pairs do
// not sum to 1, deliberately: load it with ProbabilityHandling::FaceValue.
std::vector<std::vector<double>> counterexample_matrix();

// MNL weights for the planted top-K instance: weight v + delta on the K
// items of top_set, weight v elsewhere. Requires v > 0, delta > 0, and
// |top_set| == K with valid indices.
std::vector<double> hard_instance_mnl(int n, int K, double v, double delta,
                                      const std::vector<int>& top_set);

// Plain-text serialisation of tabular models: one line per menu,
//   m;i1,...,im;p1,...,pm
// with menus in canonical (lexicographic) order and probabilities printed
// with 17 significant digits so the round trip is bit exact. Loading uses
// face-value handling so improper models round-trip; check proper() on the
// result when a genuine probability model is required.
void save_tabular(const TabularChoiceModel& model, const std::string& path);
TabularChoiceModel load_tabular(const std::string& path);

// ---------------------------------------------------------------------------
// Uniform query interface over "anything that can answer p(.|S) exactly":
// MNL models and tabular models. Exact-mode rankers and the theory module
// are written against this.

class ChoiceProbabilitySource {
 public:
  virtual ~ChoiceProbabilitySource() = default;
  virtual int item_count() const = 0;
  // Fills out[k] = p(menu.items[k] | menu); out.size() == menu.size().
  virtual void menu_probs(const Menu& menu, std::span<double> out) const = 0;
  // False when the source carries face-value masses that need not sum to 1
  // per menu; identities that assume proper distributions are skipped then.
  virtual bool normalized() const { return true; }

  double prob(const Menu& menu, int item) const;
};

class MnlSource final : public ChoiceProbabilitySource {
 public:
  explicit MnlSource(std::vector<double> weights);
  int item_count() const override { return static_cast<int>(weights_.size()); }
  void menu_probs(const Menu& menu, std::span<double> out) const override;
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

class TabularSource final : public ChoiceProbabilitySource {
 public:
  explicit TabularSource(const TabularChoiceModel& model) : model_(&model) {}
  int item_count() const override { return model_->n(); }
  void menu_probs(const Menu& menu, std::span<double> out) const override;
  bool normalized() const override { return model_->proper(); }

 private:
  const TabularChoiceModel* model_;
};

}  // namespace choicerank
