#include "causalfair/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "causalfair/error.hpp"

namespace causalfair {

namespace {

std::vector<std::size_t> row_major_strides(
    const std::vector<VariableSpec>& variables) {
  std::vector<std::size_t> strides(variables.size());
  std::size_t stride = 1;
  for (std::size_t i = variables.size(); i-- > 0;) {
    strides[i] = stride;
    stride *= static_cast<std::size_t>(variables[i].cardinality);
  }
  return strides;
}

std::size_t state_count(const std::vector<VariableSpec>& variables) {
  std::size_t total = 1;
  for (const auto& v : variables) {
    const auto card = static_cast<std::size_t>(v.cardinality);
    if (total > std::numeric_limits<std::size_t>::max() / card) {
      throw TooLargeError("joint state space overflows");
    }
    total *= card;
  }
  return total;
}

void validate_variables(const std::vector<VariableSpec>& variables) {
  std::set<std::string_view> seen;
  for (const auto& v : variables) {
    if (v.cardinality < 2) {
      throw InvalidArgumentError(
          fmt::format("variable '{}' has cardinality {} < 2", v.name,
                      v.cardinality));
    }
    if (!seen.insert(v.name).second) {
      throw InvalidArgumentError(fmt::format("duplicate variable '{}'", v.name));
    }
  }
}

// Advances a mixed-radix counter; last position fastest.
void increment(std::vector<int>& states,
               const std::vector<VariableSpec>& variables) {
  for (std::size_t i = states.size(); i-- > 0;) {
    if (++states[i] < variables[i].cardinality) return;
    states[i] = 0;
  }
}

}  // namespace

JointTable::JointTable(std::vector<VariableSpec> variables,
                       std::vector<double> probs)
    : variables_(std::move(variables)), probs_(std::move(probs)) {
  validate_variables(variables_);
  const std::size_t expected = state_count(variables_);
  if (probs_.size() != expected) {
    throw InvalidArgumentError(fmt::format(
        "joint table has {} entries, expected {}", probs_.size(), expected));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgumentError("joint table entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw InvalidArgumentError(
        fmt::format("joint table sums to {}, expected 1", total));
  }
  strides_ = row_major_strides(variables_);
}

JointTable JointTable::point_mass(std::vector<VariableSpec> variables,
                                  std::span<const int> states) {
  const JointTable shape = uniform(variables);
  std::vector<double> probs(shape.size(), 0.0);
  probs[shape.flat_index(states)] = 1.0;
  return JointTable(std::move(variables), std::move(probs));
}

JointTable JointTable::uniform(std::vector<VariableSpec> variables) {
  const std::size_t n = state_count(variables);
  return JointTable(std::move(variables),
                    std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

bool JointTable::contains(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const VariableSpec& v) { return v.name == name; });
}

std::size_t JointTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw UnknownVariableError(fmt::format("unknown variable '{}'", name));
}

std::vector<std::string> JointTable::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

std::size_t JointTable::flat_index(std::span<const int> states) const {
  if (states.size() != variables_.size()) {
    throw InvalidArgumentError("state tuple has the wrong arity");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] < 0 || states[i] >= variables_[i].cardinality) {
      throw InvalidArgumentError(fmt::format(
          "state {} out of range for '{}'", states[i], variables_[i].name));
    }
    flat += static_cast<std::size_t>(states[i]) * strides_[i];
  }
  return flat;
}

std::vector<int> JointTable::states_of(std::size_t flat) const {
  std::vector<int> states(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    states[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return states;
}

double max_abs_difference(const JointTable& a, const JointTable& b) {
  if (a.variables() != b.variables()) {
    throw InvalidArgumentError("tables are over different variables");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.probs()[i] - b.probs()[i]));
  }
  return worst;
}

JointTable marginalize(const JointTable& joint,
                       std::span<const std::string> keep) {
  if (keep.empty()) {
    throw InvalidArgumentError("marginalize needs at least one variable");
  }
  std::vector<std::size_t> source_pos;
  std::vector<VariableSpec> kept;
  for (const auto& name : keep) {
    source_pos.push_back(joint.index_of(name));
    kept.push_back(joint.variables()[source_pos.back()]);
  }
  validate_variables(kept);

  const auto target_strides = row_major_strides(kept);
  std::vector<double> out(state_count(kept), 0.0);
  std::vector<int> states(joint.variables().size(), 0);
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < source_pos.size(); ++k) {
      target += static_cast<std::size_t>(states[source_pos[k]]) *
                target_strides[k];
    }
    out[target] += joint.probs()[flat];
    increment(states, joint.variables());
  }
  return JointTable(std::move(kept), std::move(out));
}

JointTable condition(const JointTable& joint,
                     const std::map<std::string, int>& assignments) {
  std::vector<int> fixed(joint.variables().size(), -1);
  for (const auto& [name, state] : assignments) {
    const std::size_t pos = joint.index_of(name);
    if (state < 0 || state >= joint.variables()[pos].cardinality) {
      throw InvalidArgumentError(
          fmt::format("state {} out of range for '{}'", state, name));
    }
    fixed[pos] = state;
  }
  std::vector<VariableSpec> remaining;
  std::vector<std::size_t> remaining_pos;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i] < 0) {
      remaining.push_back(joint.variables()[i]);
      remaining_pos.push_back(i);
    }
  }

  const auto target_strides = row_major_strides(remaining);
  std::vector<double> out(state_count(remaining), 0.0);
  double event = 0.0;
  std::vector<int> states(joint.variables().size(), 0);
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    bool match = true;
    for (std::size_t i = 0; i < fixed.size() && match; ++i) {
      match = fixed[i] < 0 || fixed[i] == states[i];
    }
    if (match) {
      std::size_t target = 0;
      for (std::size_t k = 0; k < remaining_pos.size(); ++k) {
        target += static_cast<std::size_t>(states[remaining_pos[k]]) *
                  target_strides[k];
      }
      out[target] += joint.probs()[flat];
      event += joint.probs()[flat];
    }
    increment(states, joint.variables());
  }
  if (event < kProbabilityFloor) {
    throw ZeroProbabilityEventError(
        fmt::format("conditioning event has probability {}", event));
  }
  for (double& p : out) p /= event;
  return JointTable(std::move(remaining), std::move(out));
}

double ci_gap(const JointTable& joint, std::string_view x, std::string_view y,
              std::span<const std::string> given) {
  const std::size_t ix = joint.index_of(x);
  const std::size_t iy = joint.index_of(y);
  if (ix == iy) {
    throw InvalidArgumentError(fmt::format("ci_gap of '{}' with itself", x));
  }
  std::vector<std::string> order(given.begin(), given.end());
  for (const auto& name : order) {
    if (name == x || name == y) {
      throw InvalidArgumentError("ci_gap endpoint appears in conditioning set");
    }
  }
  order.emplace_back(x);
  order.emplace_back(y);
  const JointTable m = marginalize(joint, order);

  const int card_x = joint.variables()[ix].cardinality;
  const int card_y = joint.variables()[iy].cardinality;
  const std::size_t block = static_cast<std::size_t>(card_x * card_y);
  const std::size_t contexts = m.size() / block;

  std::vector<double> px(card_x);
  std::vector<double> py(card_y);
  double worst = 0.0;
  for (std::size_t z = 0; z < contexts; ++z) {
    const double* cell = m.probs().data() + z * block;
    double pz = 0.0;
    for (std::size_t k = 0; k < block; ++k) pz += cell[k];
    if (pz < kProbabilityFloor) continue;
    std::fill(px.begin(), px.end(), 0.0);
    std::fill(py.begin(), py.end(), 0.0);
    for (int a = 0; a < card_x; ++a) {
      for (int b = 0; b < card_y; ++b) {
        const double p = cell[a * card_y + b] / pz;
        px[a] += p;
        py[b] += p;
      }
    }
    for (int a = 0; a < card_x; ++a) {
      for (int b = 0; b < card_y; ++b) {
        const double p = cell[a * card_y + b] / pz;
        worst = std::max(worst, std::abs(p - px[a] * py[b]));
      }
    }
  }
  return worst;
}

SampleSet::SampleSet(std::vector<VariableSpec> variables)
    : variables_(std::move(variables)) {
  validate_variables(variables_);
}

void SampleSet::add(std::span<const int> states, std::uint64_t weight) {
  if (states.size() != variables_.size()) {
    throw InvalidArgumentError("observation has the wrong arity");
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] < 0 || states[i] >= variables_[i].cardinality) {
      throw InvalidArgumentError(fmt::format(
          "state {} out of range for '{}'", states[i], variables_[i].name));
    }
  }
  if (weight == 0) return;
  counts_[std::vector<int>(states.begin(), states.end())] += weight;
  total_ += weight;
}

std::size_t SampleSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw UnknownVariableError(fmt::format("unknown variable '{}'", name));
}

bool SampleSet::contains(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const VariableSpec& v) { return v.name == name; });
}

JointTable empirical_joint(const SampleSet& samples, double smoothing) {
  if (samples.total() == 0) {
    throw InvalidArgumentError("empirical_joint needs at least one observation");
  }
  if (!(smoothing >= 0.0)) {
    throw InvalidArgumentError("smoothing must be >= 0");
  }
  const std::size_t tuples = state_count(samples.variables());
  // Shape-only table used for indexing.
  const JointTable shape = JointTable::uniform(samples.variables());
  std::vector<double> probs(tuples, smoothing);
  for (const auto& [states, count] : samples.counts()) {
    probs[shape.flat_index(states)] += static_cast<double>(count);
  }
  const double denom = static_cast<double>(samples.total()) +
                       smoothing * static_cast<double>(tuples);
  for (double& p : probs) p /= denom;
  return JointTable(samples.variables(), std::move(probs));
}

int draw_categorical(std::span<const double> probs, std::mt19937_64& engine) {
  const double u = uniform_unit(engine);
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = static_cast<int>(i);
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

SampleSet sample(const JointTable& joint, std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgumentError("sample size must be >= 1");
  std::vector<double> cdf(joint.size());
  std::partial_sum(joint.probs().begin(), joint.probs().end(), cdf.begin());
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint.probs()[i] > 0.0) last_positive = i;
  }

  std::mt19937_64 engine(seed);
  std::vector<std::uint64_t> hits(joint.size(), 0);
  for (std::uint64_t draw = 0; draw < n; ++draw) {
    const double u = uniform_unit(engine);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t flat = it == cdf.end()
                                 ? last_positive
                                 : static_cast<std::size_t>(it - cdf.begin());
    ++hits[flat];
  }

  SampleSet out(joint.variables());
  for (std::size_t flat = 0; flat < hits.size(); ++flat) {
    if (hits[flat] > 0) out.add(joint.states_of(flat), hits[flat]);
  }
  return out;
}

}  // namespace causalfair
