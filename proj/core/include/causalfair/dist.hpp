#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causalfair {

// Entries of a joint table must sum to one within this tolerance.
inline constexpr double kNormalizationTolerance = 1e-9;
// Conditioning events (and ci_gap contexts) below this mass are treated as
// impossible.
inline constexpr double kProbabilityFloor = 1e-12;

struct VariableSpec {
  std::string name;
  int cardinality = 2;

  auto operator<=>(const VariableSpec&) const = default;
};

// Exact discrete joint distribution. Probabilities are stored row-major over
// the variable order: the last variable varies fastest.
class JointTable {
 public:
  // Throws InvalidArgumentError when names repeat, a cardinality is below 2,
  // the length mismatches, an entry is negative or the total is not 1.
  JointTable(std::vector<VariableSpec> variables, std::vector<double> probs);

  static JointTable point_mass(std::vector<VariableSpec> variables,
                               std::span<const int> states);
  static JointTable uniform(std::vector<VariableSpec> variables);

  const std::vector<VariableSpec>& variables() const { return variables_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  bool contains(std::string_view name) const;
  // Position of `name` in variables(). Throws UnknownVariableError.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::string> names() const;

  std::size_t flat_index(std::span<const int> states) const;
  std::vector<int> states_of(std::size_t flat) const;
  double probability(std::span<const int> states) const {
    return probs_[flat_index(states)];
  }

  bool operator==(const JointTable&) const = default;

 private:
  std::vector<VariableSpec> variables_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

// Maximum absolute entrywise difference; tables must share variables.
double max_abs_difference(const JointTable& a, const JointTable& b);

// Joint over `keep` (in that order) with every other variable summed out.
JointTable marginalize(const JointTable& joint,
                       std::span<const std::string> keep);

// Distribution of the unassigned variables given the assignments. Throws
// ZeroProbabilityEventError when the event has mass below kProbabilityFloor.
JointTable condition(const JointTable& joint,
                     const std::map<std::string, int>& assignments);

// L-infinity distance from conditional independence:
//   max over contexts z with P(z) >= floor, states (a, b) of
//   |P(x=a, y=b | z) - P(x=a | z) P(y=b | z)|.
// Zero exactly when x _||_ y | given holds.
double ci_gap(const JointTable& joint, std::string_view x, std::string_view y,
              std::span<const std::string> given = {});

// Weighted observations over a fixed variable list. Tuples are kept in
// lexicographic order so iteration is deterministic.
class SampleSet {
 public:
  explicit SampleSet(std::vector<VariableSpec> variables);

  // Throws InvalidArgumentError for out-of-range states or a wrong arity.
  void add(std::span<const int> states, std::uint64_t weight = 1);

  const std::vector<VariableSpec>& variables() const { return variables_; }
  const std::map<std::vector<int>, std::uint64_t>& counts() const {
    return counts_;
  }
  std::uint64_t total() const { return total_; }
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  bool operator==(const SampleSet&) const = default;

 private:
  std::vector<VariableSpec> variables_;
  std::map<std::vector<int>, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// P(t) = (count(t) + smoothing) / (N + smoothing * #tuples).
// Throws InvalidArgumentError for an empty sample or negative smoothing.
JointTable empirical_joint(const SampleSet& samples, double smoothing = 0.0);

// n i.i.d. draws by inverse CDF over the flattened table.
SampleSet sample(const JointTable& joint, std::uint64_t n, std::uint64_t seed);

// Uniform double in [0, 1) built from the top 53 bits of one engine output,
// so draws are identical on every standard library.
inline double uniform_unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from a discrete distribution given as probabilities.
int draw_categorical(std::span<const double> probs, std::mt19937_64& engine);

}  // namespace causalfair
