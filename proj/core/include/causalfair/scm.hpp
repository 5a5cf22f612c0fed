#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalfair/dist.hpp"
#include "causalfair/fairness.hpp"
#include "causalfair/graph.hpp"

namespace causalfair {

// One structural mechanism: a conditional probability table with one row per
// parent configuration. Rows are row-major over `parents`, last parent
// fastest; each row is a distribution over the variable's states.
struct ScmVariable {
  std::string name;
  int cardinality = 2;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> cpd;

  bool operator==(const ScmVariable&) const = default;
};

// Structural causal model over finite variables, kept in topological order.
class ScmSpec {
 public:
  ScmSpec() = default;
  // Throws InvalidArgumentError when a parent does not precede its child, a
  // CPD has the wrong shape, or a row is not a distribution.
  explicit ScmSpec(std::vector<ScmVariable> variables);

  const std::vector<ScmVariable>& variables() const { return variables_; }
  std::size_t size() const { return variables_.size(); }
  bool contains(std::string_view name) const;
  // Throws UnknownVariableError.
  std::size_t index_of(std::string_view name) const;
  const ScmVariable& variable(std::string_view name) const {
    return variables_[index_of(name)];
  }

  std::vector<VariableSpec> specs() const;
  CausalDag graph() const;
  // Product of all cardinalities, saturating at SIZE_MAX.
  std::size_t state_space() const;

  // CPD row of variable `var` selected by a full state assignment (one state
  // per variable in model order).
  std::span<const double> row_for(std::size_t var,
                                  std::span<const int> states) const;

  bool operator==(const ScmSpec& other) const {
    return variables_ == other.variables_;
  }

 private:
  std::vector<ScmVariable> variables_;
  std::vector<std::vector<std::size_t>> parent_index_;
};

inline constexpr std::size_t kMaxExactJointStates = std::size_t{1} << 20;

// Product of CPD entries over the full state space with the listed variables
// summed out. Throws TooLargeError beyond kMaxExactJointStates states.
JointTable exact_joint(const ScmSpec& scm,
                       std::span<const std::string> marginalize_out = {});

// Draws variables in model order, each from its CPD row given the sampled
// parents.
SampleSet ancestral_sample(const ScmSpec& scm, std::uint64_t n,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Correction mechanism
// ---------------------------------------------------------------------------

enum class GateMode {
  // Independent q_a = P(C = 0 | A = a) per group.
  per_group,
  // C = A xor U_C with P(U_C = 1) = u_c_prob, so q_1 = u_c_prob and
  // q_0 = 1 - u_c_prob. Requires a binary sensitive attribute.
  xor_noise,
};

// Gate, fallback prediction and label-flip settings. C = 1 lets the
// classifier through; C = 0 replaces the prediction with the fallback.
struct CorrectionPolicy {
  GateMode gate_mode = GateMode::per_group;
  std::vector<double> gate{0.0, 0.0};
  double u_c_prob = 0.0;
  // One row ignores A; otherwise one row per group.
  std::vector<std::vector<double>> fairness_policy{{0.5, 0.5}};
  // flip[a][y]: probability that the training label y of group a is flipped.
  std::vector<std::vector<double>> flip;

  // Throws InvalidArgumentError for probabilities outside [0, 1] or fallback
  // rows that are not distributions.
  void validate() const;
  double gate_probability(int group) const;
  std::span<const double> fallback(int group) const;
  double flip_probability(int group, int label) const;
  bool fallback_ignores_group() const { return fairness_policy.size() == 1; }
};

// Inserts the gate C (and U_C in xor mode) right before the prediction and
// rewires the prediction to parents {C, original parents, A}: the original
// mechanism when C = 1, the fallback for the row's group when C = 0.
// Throws MissingRoleError when A, Y or Yhat is absent.
ScmSpec build_correction_scm(const ScmSpec& base, const CorrectionPolicy& policy,
                             const FairnessTriple& triple = {});

// Flips each observation's binary label independently with probability
// flip[a][y]. Throws MissingRoleError when A or Y is absent.
SampleSet apply_label_correction(const SampleSet& samples,
                                 const CorrectionPolicy& policy,
                                 std::uint64_t seed,
                                 const FairnessTriple& triple = {});

// Empirical-risk minimizer over discrete features: for every feature tuple,
// the target state with the largest smoothed count, ties to the lower state.
class PluginClassifier {
 public:
  PluginClassifier(std::vector<VariableSpec> features, VariableSpec target,
                   std::vector<int> decisions, double smoothing);

  const std::vector<VariableSpec>& features() const { return features_; }
  const VariableSpec& target() const { return target_; }
  double smoothing() const { return smoothing_; }
  // Indexed row-major over the feature states.
  const std::vector<int>& decisions() const { return decisions_; }

  int predict(std::span<const int> feature_states) const;
  // Deterministic CPD rows (one-hot) usable as a prediction mechanism.
  std::vector<std::vector<double>> as_cpd() const;

 private:
  std::vector<VariableSpec> features_;
  VariableSpec target_;
  std::vector<int> decisions_;
  double smoothing_;
};

PluginClassifier train_plugin_classifier(const SampleSet& samples,
                                         std::span<const std::string> features,
                                         std::string_view target,
                                         double smoothing = 0.0);

// Appends (or overwrites) a `prediction` column holding the classifier's
// output for each observation.
SampleSet apply_classifier(const PluginClassifier& classifier,
                           const SampleSet& samples,
                           std::string_view prediction);

struct ModifiedEquations {
  double dp_given_c0 = 0.0;
  double eo_given_yc = 0.0;
  bool both_hold = false;
};

// Yhat _||_ A | C = 0 and Yhat _||_ A | Y, C on a joint that contains the
// gate. Throws ZeroProbabilityEventError when C = 0 is impossible.
ModifiedEquations verify_modified_equations(
    const JointTable& joint, const FairnessTriple& triple, double epsilon,
    std::string_view correction = kCorrectionNode);

struct SweepPoint {
  double gate = 0.0;
  MetricReport report;
  // Empty when the gate never fires (P(C = 0) = 0).
  std::optional<ModifiedEquations> modified;
};

struct SweepResult {
  std::vector<SweepPoint> points;
};

// Applies each value as the disadvantaged gate q_1 (u_c_prob in xor mode),
// keeping the template's other settings, and audits the exact joint.
// Throws InvalidArgumentError unless values are strictly increasing in [0, 1].
SweepResult sweep_gate(const ScmSpec& base, const CorrectionPolicy& policy_template,
                       std::span<const double> gate_values,
                       double epsilon = kDefaultEpsilon,
                       double tau = kDefaultTau,
                       const FairnessTriple& triple = {});

// Running example used by tests, docs and the bundled data files:
//   A ~ Bernoulli(0.5)
//   P(Y = 1 | A = 0) = 0.6, P(Y = 1 | A = 1) = 0.3
//   P(Yhat = 1 | Y = 1) = 0.8, P(Yhat = 1 | Y = 0) = 0.1
ScmSpec hiring_scm(const FairnessTriple& triple = {});

}  // namespace causalfair
