#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "causalfair/error.hpp"
#include "causalfair/scm.hpp"
#include "support/models.hpp"

namespace causalfair {
namespace {

using Names = std::vector<std::string>;
const FairnessTriple kTriple{};

CorrectionPolicy disadvantaged_gate(double q1) {
  CorrectionPolicy p;
  p.gate = {0.0, q1};
  return p;
}

double prediction_rate(const JointTable& joint, int group) {
  const JointTable slice = condition(joint, {{"A", group}});
  return marginalize(slice, Names{"Yhat"}).probs()[1];
}

// ----------------------------------------------------------------------------
// ScmSpec
// ----------------------------------------------------------------------------

TEST(ScmSpecTest, Validation) {
  EXPECT_THROW(ScmSpec({{"Y", 2, {"A"}, {{0.5, 0.5}, {0.5, 0.5}}},
                        {"A", 2, {}, {{0.5, 0.5}}}}),
               InvalidArgumentError);
  EXPECT_THROW(ScmSpec({{"A", 2, {}, {{0.5, 0.6}}}}), InvalidArgumentError);
  EXPECT_THROW(ScmSpec({{"A", 2, {}, {{0.5, 0.5}, {0.5, 0.5}}}}), InvalidArgumentError);
  EXPECT_THROW(ScmSpec({{"A", 2, {}, {{1.0}}}}), InvalidArgumentError);
  EXPECT_THROW(ScmSpec({{"A", 2, {}, {{0.5, 0.5}}}, {"A", 2, {}, {{0.5, 0.5}}}}),
               InvalidArgumentError);
}

TEST(ScmSpecTest, GraphMatchesParents) {
  const CausalDag g = hiring_scm().graph();
  EXPECT_TRUE(g.has_edge("A", "Y"));
  EXPECT_TRUE(g.has_edge("Y", "Yhat"));
  EXPECT_EQ(g.edge_count(), 2u);
}

// ----------------------------------------------------------------------------
// exact_joint
// ----------------------------------------------------------------------------

TEST(ExactJointTest, HiringMatchesHandExpansion) {
  const auto expected = testing::hiring_joint_by_hand();
  const JointTable j = exact_joint(hiring_scm());
  ASSERT_EQ(j.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(j.probs()[i], expected[i], 1e-15);
}

TEST(ExactJointTest, MarginalizeOut) {
  const Names drop{"Y"};
  const JointTable j = exact_joint(hiring_scm(), drop);
  EXPECT_EQ(j.names(), (Names{"A", "Yhat"}));
  EXPECT_NEAR(j.probs()[3], 0.5 * 0.31, 1e-15);
  const Names bad{"Q"};
  EXPECT_THROW(exact_joint(hiring_scm(), bad), UnknownVariableError);
}

TEST(ExactJointTest, TooLarge) {
  std::vector<ScmVariable> vars;
  for (int i = 0; i < 21; ++i) vars.push_back({"V" + std::to_string(i), 2, {}, {{0.5, 0.5}}});
  EXPECT_THROW(exact_joint(ScmSpec(vars)), TooLargeError);
}

TEST(ExactJointPropertyTest, FactorizesOverParents) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CausalDag dag = testing::random_dag(5, 0.5, rng);
    const ScmSpec scm = testing::random_binary_scm(dag, rng);
    const JointTable j = exact_joint(scm);
    // Each variable's conditional on its parents recovers its CPD.
    for (const ScmVariable& v : scm.variables()) {
      Names keep = v.parents;
      keep.push_back(v.name);
      const JointTable family = marginalize(j, keep);
      for (std::size_t row = 0; row < v.cpd.size(); ++row) {
        std::map<std::string, int> evidence;
        std::size_t r = row;
        for (std::size_t k = v.parents.size(); k-- > 0;) {
          evidence[v.parents[k]] = static_cast<int>(r % 2);
          r /= 2;
        }
        const JointTable c = condition(family, evidence);
        const JointTable m = marginalize(c, Names{v.name});
        EXPECT_NEAR(m.probs()[1], v.cpd[row][1], 1e-12);
      }
    }
  }
}

// ----------------------------------------------------------------------------
// ancestral_sample
// ----------------------------------------------------------------------------

TEST(AncestralSampleTest, Reproducible) {
  EXPECT_EQ(ancestral_sample(hiring_scm(), 5000, 7), ancestral_sample(hiring_scm(), 5000, 7));
  EXPECT_NE(ancestral_sample(hiring_scm(), 5000, 7), ancestral_sample(hiring_scm(), 5000, 8));
  EXPECT_THROW(ancestral_sample(hiring_scm(), 0, 7), InvalidArgumentError);
}

TEST(AncestralSampleTest, HiringMatchesExact) {
  const JointTable e = empirical_joint(ancestral_sample(hiring_scm(), 100000, 7));
  EXPECT_LT(max_abs_difference(e, exact_joint(hiring_scm())), 0.01);
}

TEST(AncestralSampleTest, DeterministicMechanismIsRespected) {
  const ScmSpec scm({{"A", 2, {}, {{0.3, 0.7}}}, {"B", 2, {"A"}, {{0.0, 1.0}, {1.0, 0.0}}}});
  const SampleSet s = ancestral_sample(scm, 2000, 1);
  for (const auto& [states, _] : s.counts()) EXPECT_NE(states[0], states[1]);
}

// ----------------------------------------------------------------------------
// build_correction_scm
// ----------------------------------------------------------------------------

TEST(CorrectionScmTest, Structure) {
  const ScmSpec c = build_correction_scm(hiring_scm(), disadvantaged_gate(0.5));
  EXPECT_EQ(c.specs().size(), 4u);
  EXPECT_EQ(c.variable("Yhat").parents, (Names{"C", "Y", "A"}));
  EXPECT_EQ(c.variable("C").parents, (Names{"A"}));
  EXPECT_EQ(c.index_of("C") + 1, c.index_of("Yhat"));
  const CausalDag g = c.graph();
  EXPECT_TRUE(g.has_edge("A", "C"));
  EXPECT_TRUE(g.has_edge("C", "Yhat"));
  EXPECT_TRUE(g.has_edge("A", "Yhat"));
}

TEST(CorrectionScmTest, ZeroGateReproducesBase) {
  const Names drop{"C"};
  const JointTable j = exact_joint(build_correction_scm(hiring_scm(), disadvantaged_gate(0.0)), drop);
  EXPECT_LT(max_abs_difference(j, exact_joint(hiring_scm())), 1e-15);
}

TEST(CorrectionScmTest, FullGateUsesFallback) {
  CorrectionPolicy p = disadvantaged_gate(1.0);
  p.fairness_policy = {{0.4, 0.6}};
  const JointTable j = exact_joint(build_correction_scm(hiring_scm(), p));
  EXPECT_NEAR(prediction_rate(j, 1), 0.6, 1e-12);
  EXPECT_NEAR(prediction_rate(j, 0), 0.52, 1e-12);
}

TEST(CorrectionScmTest, XorGateMatchesPerGroupGate) {
  CorrectionPolicy x;
  x.gate_mode = GateMode::xor_noise;
  x.u_c_prob = 0.3;
  CorrectionPolicy g;
  g.gate = {0.7, 0.3};
  const Names drop{"U_C"};
  const ScmSpec with_noise = build_correction_scm(hiring_scm(), x);
  EXPECT_TRUE(with_noise.contains("U_C"));
  EXPECT_EQ(with_noise.variable("C").parents, (Names{"A", "U_C"}));
  const JointTable a = exact_joint(with_noise, drop);
  const JointTable b = exact_joint(build_correction_scm(hiring_scm(), g));
  EXPECT_LT(max_abs_difference(a, b), 1e-15);
}

TEST(CorrectionScmTest, Errors) {
  const ScmSpec no_truth({{"A", 2, {}, {{0.5, 0.5}}}, {"Yhat", 2, {"A"}, {{0.5, 0.5}, {0.5, 0.5}}}});
  EXPECT_THROW(build_correction_scm(no_truth, disadvantaged_gate(0.5)), MissingRoleError);
  EXPECT_THROW(build_correction_scm(hiring_scm(), disadvantaged_gate(1.5)), InvalidArgumentError);
  CorrectionPolicy bad_fallback = disadvantaged_gate(0.5);
  bad_fallback.fairness_policy = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  EXPECT_THROW(build_correction_scm(hiring_scm(), bad_fallback), InvalidArgumentError);
  const ScmSpec corrected = build_correction_scm(hiring_scm(), disadvantaged_gate(0.5));
  EXPECT_THROW(build_correction_scm(corrected, disadvantaged_gate(0.5)), InvalidArgumentError);
}

// ----------------------------------------------------------------------------
// verify_modified_equations
// ----------------------------------------------------------------------------

TEST(ModifiedEquationsTest, GroupBlindFallbackSatisfiesBoth) {
  for (double q : {0.25, 0.5, 1.0}) {
    const JointTable j = exact_joint(build_correction_scm(hiring_scm(), disadvantaged_gate(q)));
    const ModifiedEquations m = verify_modified_equations(j, kTriple, 1e-9);
    EXPECT_LE(m.dp_given_c0, 1e-9) << q;
    EXPECT_LE(m.eo_given_yc, 1e-9) << q;
    EXPECT_TRUE(m.both_hold);
  }
}

TEST(ModifiedEquationsTest, GroupDependentFallbackBreaksDp) {
  CorrectionPolicy p;
  p.gate = {0.5, 0.5};
  p.fairness_policy = {{0.5, 0.5}, {0.2, 0.8}};
  const JointTable j = exact_joint(build_correction_scm(hiring_scm(), p));
  const ModifiedEquations m = verify_modified_equations(j, kTriple, 1e-6);
  EXPECT_NEAR(m.dp_given_c0, 0.075, 1e-12);
  EXPECT_FALSE(m.both_hold);
}

TEST(ModifiedEquationsTest, GateNeverFires) {
  const JointTable j = exact_joint(build_correction_scm(hiring_scm(), disadvantaged_gate(0.0)));
  EXPECT_THROW(verify_modified_equations(j, kTriple, 1e-6), ZeroProbabilityEventError);
  EXPECT_THROW(verify_modified_equations(exact_joint(hiring_scm()), kTriple, 1e-6),
               UnknownVariableError);
}

TEST(ModifiedEquationsTest, SampledGapsAgree) {
  const ScmSpec c = build_correction_scm(hiring_scm(), disadvantaged_gate(0.5));
  const JointTable e = empirical_joint(ancestral_sample(c, 100000, 3));
  const ModifiedEquations m = verify_modified_equations(e, kTriple, 0.01);
  EXPECT_LE(m.dp_given_c0, 0.01);
  EXPECT_LE(m.eo_given_yc, 0.01);
}

// ----------------------------------------------------------------------------
// sweep_gate
// ----------------------------------------------------------------------------

TEST(SweepTest, FrozenExactGaps) {
  // Exact rational enumeration with q_0 = 0 and a Bernoulli(1/2) fallback.
  const double gates[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double dp[] = {0.0525, 0.040625, 0.02875, 0.016875, 0.005};
  const double eo[] = {0.0, 28.0 / 1210.0, 56.0 / 1210.0, 84.0 / 1210.0, 112.0 / 1210.0};
  const SweepResult r = sweep_gate(hiring_scm(), disadvantaged_gate(0.0), gates);
  ASSERT_EQ(r.points.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.points[i].gate, gates[i]);
    EXPECT_NEAR(r.points[i].report.dp_gap, dp[i], 1e-12) << i;
    EXPECT_NEAR(r.points[i].report.eo_gap, eo[i], 1e-12) << i;
  }
  EXPECT_FALSE(r.points[0].modified.has_value());
  for (std::size_t i = 1; i < 5; ++i) {
    ASSERT_TRUE(r.points[i].modified.has_value());
    EXPECT_LE(r.points[i].modified->dp_given_c0, 1e-12);
  }
}

TEST(SweepTest, DpFallsAsGateOpens) {
  std::vector<double> gates;
  for (int i = 0; i <= 20; ++i) gates.push_back(i / 20.0);
  const SweepResult r = sweep_gate(hiring_scm(), disadvantaged_gate(0.0), gates);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    EXPECT_LT(r.points[i].report.dp_gap, r.points[i - 1].report.dp_gap);
    EXPECT_GT(r.points[i].report.eo_gap, r.points[i - 1].report.eo_gap);
  }
}

TEST(SweepTest, BothGroupsGatedGivesPureNoise) {
  CorrectionPolicy p;
  p.gate = {1.0, 0.0};
  const double gates[] = {1.0};
  const SweepResult r = sweep_gate(hiring_scm(), p, gates);
  EXPECT_NEAR(r.points[0].report.dp_gap, 0.0, 1e-15);
  EXPECT_NEAR(r.points[0].report.eo_gap, 0.0, 1e-15);
}

TEST(SweepTest, XorModeVariesNoise) {
  CorrectionPolicy p;
  p.gate_mode = GateMode::xor_noise;
  const double gates[] = {0.2, 0.8};
  const SweepResult r = sweep_gate(hiring_scm(), p, gates);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_TRUE(r.points[0].modified.has_value());
}

TEST(SweepTest, RejectsBadGrid) {
  const double unsorted[] = {0.5, 0.25};
  const double outside[] = {0.5, 1.5};
  EXPECT_THROW(sweep_gate(hiring_scm(), CorrectionPolicy{}, unsorted), InvalidArgumentError);
  EXPECT_THROW(sweep_gate(hiring_scm(), CorrectionPolicy{}, outside), InvalidArgumentError);
}

// ----------------------------------------------------------------------------
// Label correction and plug-in classification
// ----------------------------------------------------------------------------

TEST(LabelCorrectionTest, LiftsDisadvantagedBaseRate) {
  CorrectionPolicy p;
  p.flip = {{0.0, 0.0}, {0.3 / 0.7, 0.0}};
  const SampleSet base = ancestral_sample(hiring_scm(), 100000, 11);
  const SampleSet corrected = apply_label_correction(base, p, 12);
  EXPECT_EQ(corrected.total(), base.total());
  const JointTable j = empirical_joint(corrected);
  const JointTable y_given_a1 = marginalize(condition(j, {{"A", 1}}), Names{"Y"});
  const JointTable y_given_a0 = marginalize(condition(j, {{"A", 0}}), Names{"Y"});
  EXPECT_NEAR(y_given_a1.probs()[1], 0.6, 0.01);
  EXPECT_NEAR(y_given_a0.probs()[1], 0.6, 0.01);
}

TEST(LabelCorrectionTest, NoFlipsIsIdentityAndDeterministic) {
  const SampleSet base = ancestral_sample(hiring_scm(), 1000, 1);
  EXPECT_EQ(apply_label_correction(base, CorrectionPolicy{}, 5), base);
  CorrectionPolicy p;
  p.flip = {{0.1, 0.2}, {0.3, 0.4}};
  EXPECT_EQ(apply_label_correction(base, p, 5), apply_label_correction(base, p, 5));
  SampleSet missing({{"A", 2}, {"Yhat", 2}});
  missing.add(std::vector<int>{0, 0});
  EXPECT_THROW(apply_label_correction(missing, p, 5), MissingRoleError);
}

TEST(PluginClassifierTest, ErmFollowsMajority) {
  const SampleSet s = ancestral_sample(hiring_scm(), 20000, 2);
  const Names by_label{"Y"};
  const PluginClassifier copy = train_plugin_classifier(s, by_label, "Yhat");
  EXPECT_EQ(copy.decisions(), (std::vector<int>{0, 1}));
  const Names by_group{"A"};
  const PluginClassifier base_rate = train_plugin_classifier(s, by_group, "Y");
  EXPECT_EQ(base_rate.decisions(), (std::vector<int>{1, 0}));
  EXPECT_EQ(base_rate.as_cpd(), (std::vector<std::vector<double>>{{0.0, 1.0}, {1.0, 0.0}}));
}

TEST(PluginClassifierTest, TiesGoToLowerStateAndUnseenTuples) {
  SampleSet s({{"X", 3}, {"T", 2}});
  s.add(std::vector<int>{0, 0}, 2);
  s.add(std::vector<int>{0, 1}, 2);
  s.add(std::vector<int>{1, 1}, 5);
  const Names features{"X"};
  const PluginClassifier c = train_plugin_classifier(s, features, "T");
  EXPECT_EQ(c.decisions(), (std::vector<int>{0, 1, 0}));
}

TEST(PluginClassifierTest, ErmVersusCorrectedLabels) {
  // Trained on raw labels the group-only classifier reproduces the bias;
  // trained on corrected labels it predicts the same for both groups.
  const SampleSet raw = ancestral_sample(hiring_scm(), 50000, 21);
  CorrectionPolicy p;
  p.flip = {{0.0, 0.0}, {0.3 / 0.7, 0.0}};
  const SampleSet fair = apply_label_correction(raw, p, 22);
  const Names features{"A"};
  const PluginClassifier erm = train_plugin_classifier(raw, features, "Y");
  const PluginClassifier corrected = train_plugin_classifier(fair, features, "Y", 1.0);

  const SampleSet erm_pred = apply_classifier(erm, raw, "Yhat");
  const SampleSet fair_pred = apply_classifier(corrected, raw, "Yhat");
  EXPECT_NEAR(dp_gap(empirical_joint(erm_pred), kTriple), 0.25, 1e-4);
  EXPECT_NEAR(dp_gap(empirical_joint(fair_pred), kTriple), 0.0, 1e-12);
}

TEST(PluginClassifierTest, Errors) {
  const SampleSet s = ancestral_sample(hiring_scm(), 100, 2);
  const Names missing{"Q"};
  EXPECT_THROW(train_plugin_classifier(s, missing, "Y"), MissingRoleError);
  const Names self{"Y"};
  EXPECT_THROW(train_plugin_classifier(s, self, "Y"), InvalidArgumentError);
  const Names ok{"A"};
  EXPECT_THROW(train_plugin_classifier(s, ok, "Y", -1.0), InvalidArgumentError);
}

}  // namespace
}  // namespace causalfair
