#include "causalfair/fairness.hpp"

#include <map>
#include <set>

#include <fmt/format.h>

#include "causalfair/error.hpp"

namespace causalfair {

void FairnessTriple::validate(const JointTable& joint) const {
  if (sensitive == truth || sensitive == prediction || truth == prediction) {
    throw InvalidArgumentError(fmt::format(
        "fairness roles must be distinct (sensitive={}, truth={}, prediction={})",
        sensitive, truth, prediction));
  }
  joint.index_of(sensitive);
  joint.index_of(truth);
  joint.index_of(prediction);
}

double dp_gap(const JointTable& joint, const FairnessTriple& triple) {
  triple.validate(joint);
  return ci_gap(joint, triple.prediction, triple.sensitive);
}

double eo_gap(const JointTable& joint, const FairnessTriple& triple) {
  triple.validate(joint);
  const std::string given[] = {triple.truth};
  return ci_gap(joint, triple.prediction, triple.sensitive, given);
}

double pp_gap(const JointTable& joint, const FairnessTriple& triple) {
  triple.validate(joint);
  const std::string given[] = {triple.prediction};
  return ci_gap(joint, triple.truth, triple.sensitive, given);
}

double calibration_dependence(const JointTable& joint,
                              const FairnessTriple& triple) {
  triple.validate(joint);
  return ci_gap(joint, triple.truth, triple.prediction);
}

double bias_dependence(const JointTable& joint, const FairnessTriple& triple) {
  triple.validate(joint);
  return ci_gap(joint, triple.sensitive, triple.truth);
}

bool check_preconditions(const JointTable& joint, const FairnessTriple& triple,
                         double tau) {
  if (!(tau > 0.0)) throw InvalidArgumentError("tau must be > 0");
  return calibration_dependence(joint, triple) >= tau &&
         bias_dependence(joint, triple) >= tau;
}

bool prediction_determines_truth(const JointTable& joint,
                                 const FairnessTriple& triple) {
  triple.validate(joint);
  const std::string keep[] = {triple.truth, triple.prediction};
  const JointTable pair = marginalize(joint, keep);
  std::map<int, std::set<int>> forward;
  std::map<int, std::set<int>> backward;
  for (std::size_t flat = 0; flat < pair.size(); ++flat) {
    if (pair.probs()[flat] < kProbabilityFloor) continue;
    const auto states = pair.states_of(flat);
    forward[states[0]].insert(states[1]);
    backward[states[1]].insert(states[0]);
  }
  auto functional = [](const std::map<int, std::set<int>>& m) {
    for (const auto& [_, targets] : m) {
      if (targets.size() != 1) return false;
    }
    return true;
  };
  return functional(forward) && functional(backward);
}

namespace {

void check_thresholds(double epsilon, double tau) {
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be > 0");
  if (!(tau > 0.0)) throw InvalidArgumentError("tau must be > 0");
}

}  // namespace

MetricReport audit(const JointTable& joint, const FairnessTriple& triple,
                   double epsilon, double tau) {
  check_thresholds(epsilon, tau);
  MetricReport report;
  report.dp_gap = dp_gap(joint, triple);
  report.eo_gap = eo_gap(joint, triple);
  report.pp_gap = pp_gap(joint, triple);
  report.calibration_dep = calibration_dependence(joint, triple);
  report.bias_dep = bias_dependence(joint, triple);
  report.satisfied = {report.dp_gap <= epsilon, report.eo_gap <= epsilon,
                      report.pp_gap <= epsilon};
  report.preconditions_met =
      report.calibration_dep >= tau && report.bias_dep >= tau;
  report.epsilon = epsilon;
  report.tau = tau;
  return report;
}

MetricReport audit(const SampleSet& samples, const FairnessTriple& triple,
                   double epsilon, double tau, double smoothing) {
  check_thresholds(epsilon, tau);
  return audit(empirical_joint(samples, smoothing), triple, epsilon, tau);
}

GraphVerdicts graph_metric_verdicts(const CausalDag& dag,
                                    const FairnessTriple& triple) {
  const std::string& a = triple.sensitive;
  const std::string& y = triple.truth;
  const std::string& yhat = triple.prediction;
  const std::string given_y[] = {y};
  const std::string given_yhat[] = {yhat};
  GraphVerdicts verdicts;
  verdicts.dp_implied = d_separated(dag, yhat, a);
  verdicts.eo_implied = d_separated(dag, yhat, a, given_y);
  verdicts.pp_implied = d_separated(dag, y, a, given_yhat);
  verdicts.calibration_possible = !d_separated(dag, y, yhat);
  verdicts.bias_possible = !d_separated(dag, a, y);
  return verdicts;
}

CalibrationAsymmetry calibration_asymmetry(const JointTable& joint,
                                           const FairnessTriple& triple,
                                           int value, int advantaged,
                                           int disadvantaged) {
  triple.validate(joint);
  const std::string keep[] = {triple.truth};
  auto ppv = [&](int group) {
    const JointTable slice = marginalize(
        condition(joint, {{triple.prediction, value}, {triple.sensitive, group}}),
        keep);
    const int states[] = {value};
    return slice.probability(states);
  };
  CalibrationAsymmetry out;
  out.adv_ppv = ppv(advantaged);
  out.disadv_ppv = ppv(disadvantaged);
  out.direction_holds = out.adv_ppv > out.disadv_ppv;
  return out;
}

}  // namespace causalfair
