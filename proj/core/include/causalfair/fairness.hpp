#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "causalfair/dist.hpp"
#include "causalfair/graph.hpp"

namespace causalfair {

inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr double kDefaultTau = 0.05;

// Group encoding used throughout: A = 0 is the advantaged group, A = 1 the
// disadvantaged group.
inline constexpr int kAdvantagedGroup = 0;
inline constexpr int kDisadvantagedGroup = 1;

// Role assignment of the sensitive attribute A, the true label Y and the
// prediction Yhat.
struct FairnessTriple {
  std::string sensitive{kSensitiveNode};
  std::string truth{kTruthNode};
  std::string prediction{kPredictionNode};

  // Throws InvalidArgumentError for repeated names and UnknownVariableError
  // when a role is missing from the table.
  void validate(const JointTable& joint) const;
};

// Demographic parity: Yhat _||_ A.
double dp_gap(const JointTable& joint, const FairnessTriple& triple);
// Equalized odds: Yhat _||_ A | Y.
double eo_gap(const JointTable& joint, const FairnessTriple& triple);
// Predictive parity: Y _||_ A | Yhat.
double pp_gap(const JointTable& joint, const FairnessTriple& triple);
// Dependence of the prediction on the truth, gap of Y _||_ Yhat.
double calibration_dependence(const JointTable& joint,
                              const FairnessTriple& triple);
// Dependence of the truth on the sensitive attribute, gap of A _||_ Y.
double bias_dependence(const JointTable& joint, const FairnessTriple& triple);

// The classifier is informative (calibration_dependence >= tau) and the
// sensitive attribute can introduce bias (bias_dependence >= tau).
bool check_preconditions(const JointTable& joint, const FairnessTriple& triple,
                         double tau);

// True when Y and Yhat determine each other on their support, i.e. every
// observed label maps to exactly one prediction and back. This is the
// perfect (or perfectly relabelled) predictor.
bool prediction_determines_truth(const JointTable& joint,
                                 const FairnessTriple& triple);

struct MetricFlags {
  bool dp = false;
  bool eo = false;
  bool pp = false;

  int count() const { return int{dp} + int{eo} + int{pp}; }
  auto operator<=>(const MetricFlags&) const = default;
};

struct MetricReport {
  double dp_gap = 0.0;
  double eo_gap = 0.0;
  double pp_gap = 0.0;
  double calibration_dep = 0.0;
  double bias_dep = 0.0;
  MetricFlags satisfied;
  bool preconditions_met = false;
  double epsilon = kDefaultEpsilon;
  double tau = kDefaultTau;
};

// Throws InvalidArgumentError unless epsilon, tau > 0.
MetricReport audit(const JointTable& joint, const FairnessTriple& triple,
                   double epsilon = kDefaultEpsilon, double tau = kDefaultTau);
MetricReport audit(const SampleSet& samples, const FairnessTriple& triple,
                   double epsilon = kDefaultEpsilon, double tau = kDefaultTau,
                   double smoothing = 0.0);

struct GraphVerdicts {
  bool dp_implied = false;
  bool eo_implied = false;
  bool pp_implied = false;
  bool calibration_possible = false;
  bool bias_possible = false;

  bool operator==(const GraphVerdicts&) const = default;
};

// Which metrics every distribution faithful to `dag` must satisfy, and
// whether the two preconditions can hold at all.
GraphVerdicts graph_metric_verdicts(const CausalDag& dag,
                                    const FairnessTriple& triple = {});

struct CalibrationAsymmetry {
  double adv_ppv = 0.0;
  double disadv_ppv = 0.0;
  bool direction_holds = false;
};

// P(Y = value | Yhat = value, A = group) for both groups. The correction
// mechanism is expected to leave the disadvantaged value strictly lower.
CalibrationAsymmetry calibration_asymmetry(
    const JointTable& joint, const FairnessTriple& triple, int value,
    int advantaged = kAdvantagedGroup,
    int disadvantaged = kDisadvantagedGroup);

// ---------------------------------------------------------------------------
// Brute-force impossibility scan over binary (A, Y, Yhat) tables.
// ---------------------------------------------------------------------------

inline constexpr int kMinScanResolution = 10;

enum class TrivialReason {
  none,
  precondition_failed,
  deterministic_prediction,
};

std::string_view to_string(TrivialReason reason);

// One grid point: counts[a * 4 + y * 2 + yhat] / resolution.
struct ScanTable {
  std::array<int, 8> counts{};
  MetricFlags satisfied;
  TrivialReason reason = TrivialReason::none;

  auto operator<=>(const ScanTable&) const = default;
};

struct ScanOptions {
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Treat perfect predictors (Y and Yhat determine each other) as trivial.
  bool exempt_deterministic_prediction = true;
};

struct ImpossibilityVerdict {
  int resolution = 0;
  double epsilon = 0.0;
  double tau = 0.0;
  std::uint64_t tested = 0;
  std::uint64_t precondition_passing = 0;
  std::uint64_t multi_satisfying = 0;
  // Grid points that pass the preconditions, satisfy two or more metrics
  // and were exempted as perfect predictors.
  std::uint64_t deterministic_prediction = 0;
  std::vector<ScanTable> witnesses;
  std::vector<ScanTable> trivial_witnesses;
};

// Number of grid points, C(resolution + 7, 7).
std::uint64_t scan_grid_size(int resolution);

JointTable scan_table_joint(const ScanTable& table, int resolution,
                            const FairnessTriple& triple = {});

// Enumerates every table whose 8 entries are multiples of 1/resolution.
// Requires resolution >= kMinScanResolution, 0 < epsilon < tau / 2.
ImpossibilityVerdict impossibility_scan(int resolution, double epsilon,
                                        double tau,
                                        const ScanOptions& options = {});

}  // namespace causalfair
