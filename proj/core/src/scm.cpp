#include "causalfair/scm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <fmt/format.h>

#include "causalfair/error.hpp"

namespace causalfair {

namespace {

bool is_distribution(std::span<const double> row) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= kNormalizationTolerance;
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

ScmSpec::ScmSpec(std::vector<ScmVariable> variables)
    : variables_(std::move(variables)) {
  std::set<std::string_view> seen;
  parent_index_.reserve(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (!is_valid_node_name(v.name)) {
      throw InvalidArgumentError(fmt::format("invalid variable name '{}'", v.name));
    }
    if (v.cardinality < 2) {
      throw InvalidArgumentError(
          fmt::format("variable '{}' has cardinality {} < 2", v.name, v.cardinality));
    }
    std::vector<std::size_t> parents;
    std::size_t rows = 1;
    for (const auto& parent : v.parents) {
      if (!seen.contains(parent)) {
        throw InvalidArgumentError(fmt::format(
            "parent '{}' of '{}' is not declared before it", parent, v.name));
      }
      const std::size_t p = index_of(parent);
      if (std::find(parents.begin(), parents.end(), p) != parents.end()) {
        throw InvalidArgumentError(
            fmt::format("'{}' lists parent '{}' twice", v.name, parent));
      }
      parents.push_back(p);
      rows *= static_cast<std::size_t>(variables_[p].cardinality);
    }
    if (v.cpd.size() != rows) {
      throw InvalidArgumentError(fmt::format(
          "CPD of '{}' has {} rows, expected {}", v.name, v.cpd.size(), rows));
    }
    for (const auto& row : v.cpd) {
      if (row.size() != static_cast<std::size_t>(v.cardinality) ||
          !is_distribution(row)) {
        throw InvalidArgumentError(
            fmt::format("CPD of '{}' has a row that is not a distribution over {} states",
                        v.name, v.cardinality));
      }
    }
    if (!seen.insert(v.name).second) {
      throw InvalidArgumentError(fmt::format("duplicate variable '{}'", v.name));
    }
    parent_index_.push_back(std::move(parents));
  }
}

bool ScmSpec::contains(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const ScmVariable& v) { return v.name == name; });
}

std::size_t ScmSpec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw UnknownVariableError(fmt::format("unknown variable '{}'", name));
}

std::vector<VariableSpec> ScmSpec::specs() const {
  std::vector<VariableSpec> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back({v.name, v.cardinality});
  return out;
}

CausalDag ScmSpec::graph() const {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  for (const auto& v : variables_) {
    nodes.push_back(v.name);
    for (const auto& parent : v.parents) edges.push_back({parent, v.name});
  }
  return CausalDag(std::move(nodes), edges);
}

std::size_t ScmSpec::state_space() const {
  std::size_t total = 1;
  for (const auto& v : variables_) {
    const auto card = static_cast<std::size_t>(v.cardinality);
    if (total > std::numeric_limits<std::size_t>::max() / card) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= card;
  }
  return total;
}

std::span<const double> ScmSpec::row_for(std::size_t var,
                                         std::span<const int> states) const {
  std::size_t row = 0;
  for (std::size_t p : parent_index_[var]) {
    row = row * static_cast<std::size_t>(variables_[p].cardinality) +
          static_cast<std::size_t>(states[p]);
  }
  return variables_[var].cpd[row];
}

JointTable exact_joint(const ScmSpec& scm,
                       std::span<const std::string> marginalize_out) {
  const std::size_t states_total = scm.state_space();
  if (states_total > kMaxExactJointStates) {
    throw TooLargeError(fmt::format(
        "exact_joint supports at most {} states", kMaxExactJointStates));
  }
  if (scm.size() == 0) throw InvalidArgumentError("model has no variables");

  const auto specs = scm.specs();
  std::vector<double> probs(states_total);
  std::vector<int> states(scm.size(), 0);
  for (std::size_t flat = 0; flat < states_total; ++flat) {
    double p = 1.0;
    for (std::size_t v = 0; v < scm.size() && p > 0.0; ++v) {
      p *= scm.row_for(v, states)[static_cast<std::size_t>(states[v])];
    }
    probs[flat] = p;
    for (std::size_t i = states.size(); i-- > 0;) {
      if (++states[i] < specs[i].cardinality) break;
      states[i] = 0;
    }
  }
  JointTable full(specs, std::move(probs));
  if (marginalize_out.empty()) return full;

  std::set<std::string, std::less<>> drop;
  for (const auto& name : marginalize_out) {
    scm.index_of(name);
    drop.insert(name);
  }
  std::vector<std::string> keep;
  for (const auto& v : specs) {
    if (!drop.contains(v.name)) keep.push_back(v.name);
  }
  return marginalize(full, keep);
}

SampleSet ancestral_sample(const ScmSpec& scm, std::uint64_t n,
                           std::uint64_t seed) {
  if (n == 0) throw InvalidArgumentError("sample size must be >= 1");
  std::mt19937_64 engine(seed);
  SampleSet out(scm.specs());
  std::vector<int> states(scm.size(), 0);
  for (std::uint64_t draw = 0; draw < n; ++draw) {
    for (std::size_t v = 0; v < scm.size(); ++v) {
      states[v] = draw_categorical(scm.row_for(v, states), engine);
    }
    out.add(states);
  }
  return out;
}

void CorrectionPolicy::validate() const {
  if (gate_mode == GateMode::per_group) {
    if (gate.empty()) throw InvalidArgumentError("gate needs one entry per group");
    for (double q : gate) {
      if (!is_probability(q)) {
        throw InvalidArgumentError(fmt::format("gate probability {} outside [0, 1]", q));
      }
    }
  } else if (!is_probability(u_c_prob)) {
    throw InvalidArgumentError(
        fmt::format("U_C probability {} outside [0, 1]", u_c_prob));
  }
  if (fairness_policy.empty()) {
    throw InvalidArgumentError("fairness policy needs at least one row");
  }
  for (const auto& row : fairness_policy) {
    if (row.size() < 2 || !is_distribution(row)) {
      throw InvalidArgumentError("fairness policy rows must be distributions");
    }
  }
  for (const auto& row : flip) {
    for (double f : row) {
      if (!is_probability(f)) {
        throw InvalidArgumentError(fmt::format("flip probability {} outside [0, 1]", f));
      }
    }
  }
}

double CorrectionPolicy::gate_probability(int group) const {
  if (gate_mode == GateMode::xor_noise) {
    if (group == 0) return 1.0 - u_c_prob;
    if (group == 1) return u_c_prob;
    throw InvalidArgumentError("xor gate requires a binary sensitive attribute");
  }
  if (group < 0 || static_cast<std::size_t>(group) >= gate.size()) {
    throw InvalidArgumentError(fmt::format("no gate probability for group {}", group));
  }
  return gate[static_cast<std::size_t>(group)];
}

std::span<const double> CorrectionPolicy::fallback(int group) const {
  if (fallback_ignores_group()) return fairness_policy.front();
  if (group < 0 || static_cast<std::size_t>(group) >= fairness_policy.size()) {
    throw InvalidArgumentError(fmt::format("no fairness policy row for group {}", group));
  }
  return fairness_policy[static_cast<std::size_t>(group)];
}

double CorrectionPolicy::flip_probability(int group, int label) const {
  if (group < 0 || label < 0) return 0.0;
  const auto g = static_cast<std::size_t>(group);
  const auto l = static_cast<std::size_t>(label);
  if (g >= flip.size() || l >= flip[g].size()) return 0.0;
  return flip[g][l];
}

ScmSpec build_correction_scm(const ScmSpec& base, const CorrectionPolicy& policy,
                             const FairnessTriple& triple) {
  policy.validate();
  for (const auto& role : {triple.sensitive, triple.truth, triple.prediction}) {
    if (!base.contains(role)) {
      throw MissingRoleError(fmt::format("model has no variable '{}'", role));
    }
  }
  for (std::string_view reserved : {kCorrectionNode, kCorrectionNoiseNode}) {
    if (base.contains(reserved)) {
      throw InvalidArgumentError(
          fmt::format("model already has a variable named '{}'", reserved));
    }
  }
  const std::size_t a_pos = base.index_of(triple.sensitive);
  const std::size_t yhat_pos = base.index_of(triple.prediction);
  if (a_pos > yhat_pos) {
    throw InvalidArgumentError(
        "the sensitive attribute must precede the prediction in the model");
  }
  const ScmVariable& a = base.variables()[a_pos];
  const ScmVariable& yhat = base.variables()[yhat_pos];
  for (const auto& row : policy.fairness_policy) {
    if (row.size() != static_cast<std::size_t>(yhat.cardinality)) {
      throw InvalidArgumentError(
          "fairness policy rows must cover every prediction state");
    }
  }
  if (!policy.fallback_ignores_group() &&
      policy.fairness_policy.size() != static_cast<std::size_t>(a.cardinality)) {
    throw InvalidArgumentError("fairness policy needs one row per group");
  }

  std::vector<ScmVariable> vars(base.variables().begin(),
                                base.variables().begin() + yhat_pos);

  ScmVariable gate{std::string(kCorrectionNode), 2, {a.name}, {}};
  if (policy.gate_mode == GateMode::xor_noise) {
    if (a.cardinality != 2) {
      throw InvalidArgumentError("xor gate requires a binary sensitive attribute");
    }
    vars.push_back({std::string(kCorrectionNoiseNode), 2, {},
                    {{1.0 - policy.u_c_prob, policy.u_c_prob}}});
    gate.parents.push_back(std::string(kCorrectionNoiseNode));
    for (int av = 0; av < 2; ++av) {
      for (int u = 0; u < 2; ++u) {
        gate.cpd.push_back((av ^ u) == 0 ? std::vector{1.0, 0.0}
                                         : std::vector{0.0, 1.0});
      }
    }
  } else {
    if (policy.gate.size() != static_cast<std::size_t>(a.cardinality)) {
      throw InvalidArgumentError("gate needs one probability per group");
    }
    for (int av = 0; av < a.cardinality; ++av) {
      const double q = policy.gate_probability(av);
      gate.cpd.push_back({q, 1.0 - q});
    }
  }
  vars.push_back(gate);

  // New prediction parents: C first, then the original parents, then A when
  // it was not already one of them.
  ScmVariable corrected{yhat.name, yhat.cardinality, {gate.name}, {}};
  corrected.parents.insert(corrected.parents.end(), yhat.parents.begin(),
                           yhat.parents.end());
  const auto a_in_parents =
      std::find(yhat.parents.begin(), yhat.parents.end(), a.name);
  const bool append_a = a_in_parents == yhat.parents.end();
  if (append_a) corrected.parents.push_back(a.name);

  std::vector<int> parent_cards;
  for (const auto& parent : yhat.parents) {
    parent_cards.push_back(base.variable(parent).cardinality);
  }
  const std::size_t a_slot =
      append_a ? yhat.parents.size()
               : static_cast<std::size_t>(a_in_parents - yhat.parents.begin());
  if (append_a) parent_cards.push_back(a.cardinality);

  for (int c = 0; c < 2; ++c) {
    std::vector<int> combo(parent_cards.size(), 0);
    bool more = true;
    while (more) {
      if (c == 1) {
        std::size_t row = 0;
        for (std::size_t k = 0; k < yhat.parents.size(); ++k) {
          row = row * static_cast<std::size_t>(parent_cards[k]) +
                static_cast<std::size_t>(combo[k]);
        }
        corrected.cpd.push_back(yhat.cpd[row]);
      } else {
        const auto fallback = policy.fallback(combo[a_slot]);
        corrected.cpd.emplace_back(fallback.begin(), fallback.end());
      }
      more = false;
      for (std::size_t k = combo.size(); k-- > 0;) {
        if (++combo[k] < parent_cards[k]) {
          more = true;
          break;
        }
        combo[k] = 0;
      }
    }
  }
  vars.push_back(std::move(corrected));
  vars.insert(vars.end(), base.variables().begin() + yhat_pos + 1,
              base.variables().end());
  return ScmSpec(std::move(vars));
}

SampleSet apply_label_correction(const SampleSet& samples,
                                 const CorrectionPolicy& policy,
                                 std::uint64_t seed,
                                 const FairnessTriple& triple) {
  policy.validate();
  if (!samples.contains(triple.sensitive) || !samples.contains(triple.truth)) {
    throw MissingRoleError(fmt::format("samples need columns '{}' and '{}'",
                                       triple.sensitive, triple.truth));
  }
  const std::size_t a_pos = samples.index_of(triple.sensitive);
  const std::size_t y_pos = samples.index_of(triple.truth);
  if (samples.variables()[y_pos].cardinality != 2) {
    throw InvalidArgumentError("label correction needs a binary label");
  }

  std::mt19937_64 engine(seed);
  SampleSet out(samples.variables());
  for (const auto& [states, count] : samples.counts()) {
    const double f = policy.flip_probability(states[a_pos], states[y_pos]);
    std::uint64_t flipped = 0;
    if (f >= 1.0) {
      flipped = count;
    } else if (f > 0.0) {
      for (std::uint64_t i = 0; i < count; ++i) {
        if (uniform_unit(engine) < f) ++flipped;
      }
    }
    auto moved = states;
    moved[y_pos] = 1 - moved[y_pos];
    out.add(states, count - flipped);
    out.add(moved, flipped);
  }
  return out;
}

PluginClassifier::PluginClassifier(std::vector<VariableSpec> features,
                                   VariableSpec target,
                                   std::vector<int> decisions, double smoothing)
    : features_(std::move(features)),
      target_(std::move(target)),
      decisions_(std::move(decisions)),
      smoothing_(smoothing) {
  std::size_t tuples = 1;
  for (const auto& f : features_) tuples *= static_cast<std::size_t>(f.cardinality);
  if (decisions_.size() != tuples) {
    throw InvalidArgumentError("classifier must cover every feature tuple");
  }
}

int PluginClassifier::predict(std::span<const int> feature_states) const {
  if (feature_states.size() != features_.size()) {
    throw InvalidArgumentError("feature tuple has the wrong arity");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (feature_states[k] < 0 || feature_states[k] >= features_[k].cardinality) {
      throw InvalidArgumentError("feature state out of range");
    }
    flat = flat * static_cast<std::size_t>(features_[k].cardinality) +
           static_cast<std::size_t>(feature_states[k]);
  }
  return decisions_[flat];
}

std::vector<std::vector<double>> PluginClassifier::as_cpd() const {
  std::vector<std::vector<double>> rows;
  rows.reserve(decisions_.size());
  for (int d : decisions_) {
    std::vector<double> row(static_cast<std::size_t>(target_.cardinality), 0.0);
    row[static_cast<std::size_t>(d)] = 1.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

PluginClassifier train_plugin_classifier(const SampleSet& samples,
                                         std::span<const std::string> features,
                                         std::string_view target,
                                         double smoothing) {
  if (!(smoothing >= 0.0)) throw InvalidArgumentError("smoothing must be >= 0");
  auto column = [&](std::string_view name) {
    if (!samples.contains(name)) {
      throw MissingRoleError(fmt::format("samples have no column '{}'", name));
    }
    return samples.index_of(name);
  };
  std::vector<std::size_t> feature_pos;
  std::vector<VariableSpec> feature_specs;
  for (const auto& f : features) {
    if (f == target) throw InvalidArgumentError("target cannot be a feature");
    feature_pos.push_back(column(f));
    feature_specs.push_back(samples.variables()[feature_pos.back()]);
  }
  const std::size_t target_pos = column(target);
  const VariableSpec target_spec = samples.variables()[target_pos];
  const auto card = static_cast<std::size_t>(target_spec.cardinality);

  std::size_t tuples = 1;
  for (const auto& f : feature_specs) tuples *= static_cast<std::size_t>(f.cardinality);
  std::vector<double> scores(tuples * card, smoothing);
  for (const auto& [states, count] : samples.counts()) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < feature_pos.size(); ++k) {
      flat = flat * static_cast<std::size_t>(feature_specs[k].cardinality) +
             static_cast<std::size_t>(states[feature_pos[k]]);
    }
    scores[flat * card + static_cast<std::size_t>(states[target_pos])] +=
        static_cast<double>(count);
  }

  std::vector<int> decisions(tuples, 0);
  for (std::size_t t = 0; t < tuples; ++t) {
    const auto begin = scores.begin() + static_cast<std::ptrdiff_t>(t * card);
    // max_element returns the first maximum, i.e. the lowest state on ties.
    decisions[t] = static_cast<int>(
        std::max_element(begin, begin + static_cast<std::ptrdiff_t>(card)) - begin);
  }
  return PluginClassifier(std::move(feature_specs), target_spec,
                          std::move(decisions), smoothing);
}

SampleSet apply_classifier(const PluginClassifier& classifier,
                           const SampleSet& samples,
                           std::string_view prediction) {
  std::vector<std::size_t> feature_pos;
  for (const auto& f : classifier.features()) {
    if (!samples.contains(f.name)) {
      throw MissingRoleError(fmt::format("samples have no column '{}'", f.name));
    }
    feature_pos.push_back(samples.index_of(f.name));
  }
  auto variables = samples.variables();
  std::size_t out_pos = variables.size();
  if (samples.contains(prediction)) {
    out_pos = samples.index_of(prediction);
    variables[out_pos].cardinality = classifier.target().cardinality;
  } else {
    variables.push_back({std::string(prediction), classifier.target().cardinality});
  }

  SampleSet out(variables);
  std::vector<int> features(feature_pos.size());
  for (const auto& [states, count] : samples.counts()) {
    for (std::size_t k = 0; k < feature_pos.size(); ++k) {
      features[k] = states[feature_pos[k]];
    }
    auto row = states;
    if (out_pos == row.size()) row.push_back(0);
    row[out_pos] = classifier.predict(features);
    out.add(row, count);
  }
  return out;
}

ModifiedEquations verify_modified_equations(const JointTable& joint,
                                            const FairnessTriple& triple,
                                            double epsilon,
                                            std::string_view correction) {
  triple.validate(joint);
  const std::string gate(correction);
  joint.index_of(gate);
  ModifiedEquations out;
  const JointTable gated = condition(joint, {{gate, 0}});
  out.dp_given_c0 = ci_gap(gated, triple.prediction, triple.sensitive);
  const std::string given[] = {triple.truth, gate};
  out.eo_given_yc = ci_gap(joint, triple.prediction, triple.sensitive, given);
  out.both_hold = out.dp_given_c0 <= epsilon && out.eo_given_yc <= epsilon;
  return out;
}

SweepResult sweep_gate(const ScmSpec& base, const CorrectionPolicy& policy_template,
                       std::span<const double> gate_values, double epsilon,
                       double tau, const FairnessTriple& triple) {
  for (std::size_t i = 0; i < gate_values.size(); ++i) {
    if (!is_probability(gate_values[i])) {
      throw InvalidArgumentError(
          fmt::format("gate value {} outside [0, 1]", gate_values[i]));
    }
    if (i > 0 && !(gate_values[i] > gate_values[i - 1])) {
      throw InvalidArgumentError("gate values must be strictly increasing");
    }
  }
  const std::string drop[] = {std::string(kCorrectionNoiseNode)};
  SweepResult result;
  for (double q : gate_values) {
    CorrectionPolicy policy = policy_template;
    if (policy.gate_mode == GateMode::xor_noise) {
      policy.u_c_prob = q;
    } else {
      if (policy.gate.size() <= static_cast<std::size_t>(kDisadvantagedGroup)) {
        policy.gate.resize(kDisadvantagedGroup + 1, 0.0);
      }
      policy.gate[kDisadvantagedGroup] = q;
    }
    const ScmSpec corrected = build_correction_scm(base, policy, triple);
    const JointTable joint =
        policy.gate_mode == GateMode::xor_noise ? exact_joint(corrected, drop)
                                                : exact_joint(corrected);
    SweepPoint point;
    point.gate = q;
    point.report = audit(joint, triple, epsilon, tau);
    try {
      point.modified = verify_modified_equations(joint, triple, epsilon);
    } catch (const ZeroProbabilityEventError&) {
      point.modified.reset();
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

ScmSpec hiring_scm(const FairnessTriple& triple) {
  return ScmSpec({
      {triple.sensitive, 2, {}, {{0.5, 0.5}}},
      {triple.truth, 2, {triple.sensitive}, {{0.4, 0.6}, {0.7, 0.3}}},
      {triple.prediction, 2, {triple.truth}, {{0.9, 0.1}, {0.2, 0.8}}},
  });
}

}  // namespace causalfair
