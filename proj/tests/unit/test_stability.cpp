#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "stabx/core/errors.hpp"
#include "stabx/learners/kmeans.hpp"
#include "stabx/perturb/plan.hpp"
#include "stabx/stability/aggregate.hpp"
#include "stabx/stability/association.hpp"
#include "stabx/stability/prediction.hpp"
#include "stabx/stability/table.hpp"
#include "support/testdata.hpp"

using namespace stabx;
using namespace stabx::stability;

namespace {

std::optional<InterpretationArtifact> artifact(Interpretation value, std::size_t repeat = 0,
                                               std::string plan = "p") {
  return InterpretationArtifact{"m", repeat, 0, std::move(plan), std::move(value)};
}

FeatureRanking top3(std::vector<std::size_t> first) {
  std::vector<double> scores(6, 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) scores[first[i]] = 10.0 - static_cast<double>(i);
  return FeatureRanking::from_scores(scores);
}

PredictionSet preds(std::vector<double> values, bool classification = false,
                    std::vector<std::string> ids = {}) {
  if (ids.empty()) ids = stabx::testing::row_ids(values.size());
  PredictionSet p;
  p.sample_ids = ids;
  p.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  p.truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(values.size()));
  p.classification = classification;
  return p;
}

}  // namespace

TEST(WithinMethod, IdenticalRankingsScoreOne) {
  std::vector<std::optional<InterpretationArtifact>> repeats;
  for (std::size_t r = 0; r < 4; ++r) repeats.push_back(artifact(top3({2, 0, 1}), r));
  for (auto metric : {metrics::RankMetric::jaccard, metrics::RankMetric::ao, metrics::RankMetric::kendall}) {
    MetricSpec spec;
    spec.rank = metric;
    spec.k = 3;
    const auto s = within_method(repeats, spec);
    EXPECT_DOUBLE_EQ(*s.mean, 1.0);
    EXPECT_EQ(s.pairs, 6u);
  }
}

TEST(WithinMethod, MeanOfPairScores) {
  MetricSpec spec;
  spec.rank = metrics::RankMetric::jaccard;
  spec.k = 3;
  // Pairwise Jaccard@3: 1, 0.5, 0.5.
  const std::vector<std::optional<InterpretationArtifact>> repeats{
      artifact(top3({0, 1, 2})), artifact(top3({2, 1, 0}), 1), artifact(top3({0, 1, 3}), 2)};
  const auto s = within_method(repeats, spec);
  EXPECT_DOUBLE_EQ(*s.mean, 2.0 / 3.0);
  EXPECT_EQ(s.repeats_ok, 3u);
}

TEST(WithinMethod, FailedRepeatsAndMissingCells) {
  MetricSpec spec;
  std::vector<std::optional<InterpretationArtifact>> repeats{artifact(top3({0, 1, 2})), std::nullopt,
                                                              artifact(top3({0, 1, 2}), 2)};
  auto s = within_method(repeats, spec);
  EXPECT_EQ(s.repeats_ok, 2u);
  EXPECT_EQ(s.repeats_total, 3u);
  EXPECT_EQ(s.pairs, 1u);
  ASSERT_TRUE(s.mean.has_value());
  repeats[2].reset();
  s = within_method(repeats, spec);
  EXPECT_FALSE(s.mean.has_value());
  EXPECT_FALSE(s.note.empty());
}

TEST(WithinMethod, LabelingsComparedOnCommonSamples) {
  const ClusterLabeling a{{"a", "b", "c", "d", "e"}, {0, 1, 0, 1, 1}, 2};
  const ClusterLabeling b{{"a", "c", "d", "e", "f"}, {1, 1, 0, 0, 1}, 2};
  MetricSpec spec;
  const auto score = pair_score(a, b, spec);
  ASSERT_TRUE(score.has_value());
  // a,c,d,e: A = (0,0,1,1), B = (1,1,0,0).
  EXPECT_DOUBLE_EQ(*score, 1.0);
  EXPECT_EQ(common_samples(a, b), 4u);
  const ClusterLabeling c{{"x", "y"}, {0, 1}, 2};
  EXPECT_FALSE(pair_score(a, c, spec).has_value());
}

TEST(BetweenMethod, SelfComparisonAndSingleRepeat) {
  MetricSpec spec;
  spec.k = 3;
  const std::vector<std::optional<InterpretationArtifact>> a{artifact(top3({0, 1, 2})),
                                                             artifact(top3({3, 4, 5}), 1)};
  EXPECT_DOUBLE_EQ(*between_method(a, a, spec).mean, 1.0);
  const std::vector<std::optional<InterpretationArtifact>> one_a{artifact(top3({0, 1, 2}))};
  const std::vector<std::optional<InterpretationArtifact>> one_b{artifact(top3({1, 0, 2}))};
  EXPECT_DOUBLE_EQ(*between_method(one_a, one_b, spec).mean, 2.0 / 3.0);
  const std::vector<std::optional<InterpretationArtifact>> other{artifact(top3({0, 1, 2}), 0, "q")};
  EXPECT_THROW(between_method(one_a, other, spec), ValidationError);
}

TEST(BetweenMethod, KMeansInitsAgreeOnSeparatedBlobs) {
  Eigen::MatrixXd centers(3, 2);
  centers << 0, 0, 12, 0, 0, 12;
  const auto b = stabx::testing::gaussian_blobs(90, centers, 0.5, 1);
  const auto d = stabx::testing::unsupervised(b.points);
  const auto plan = perturb::make_subsamples(d, 0.7, 4, 2);
  std::vector<std::optional<InterpretationArtifact>> km, kmpp;
  for (std::size_t r = 0; r < plan.repeats(); ++r) {
    const auto sub = d.subset(plan.draws[r].retained);
    km.push_back(artifact(learners::kmeans(sub, 3, {learners::KMeansInit::random, 300, 10, r}), r));
    kmpp.push_back(artifact(learners::kmeans(sub, 3, {learners::KMeansInit::kmeanspp, 300, 10, r}), r));
  }
  const auto s = between_method(km, kmpp, MetricSpec{});
  EXPECT_DOUBLE_EQ(*s.mean, 1.0);
  EXPECT_EQ(s.pairs, 4u);
}

TEST(OrderedMean, IndependentOfOrder) {
  EXPECT_EQ(ordered_mean({0.1, 0.7, 1e-17, 0.2}), ordered_mean({0.2, 1e-17, 0.7, 0.1}));
}

TEST(PredictionStability, EntropyExamples) {
  const std::vector<double> same{1, 1, 1}, half{0, 1, 0, 1}, four{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(label_agreement_score(same), 1.0);
  EXPECT_DOUBLE_EQ(label_agreement_score(half), 0.5);
  EXPECT_DOUBLE_EQ(label_agreement_score(four), 0.25);
}

TEST(PredictionStability, SpreadExamples) {
  const std::vector<double> constant{3, 3, 3}, pair{0, 2}, shifted{5, 7};
  EXPECT_DOUBLE_EQ(spread_score(constant), 1.0);
  EXPECT_DOUBLE_EQ(spread_score(pair), std::exp(-std::sqrt(2.0)));
  EXPECT_DOUBLE_EQ(spread_score(shifted), spread_score(pair));
}

TEST(PredictionStability, SamplesSeenOnceAreExcluded) {
  const std::vector<PredictionSet> repeats{preds({0, 2}, false, {"a", "b"}), preds({2}, false, {"a"}),
                                           preds({9}, false, {"c"})};
  const auto s = prediction_stability(repeats);
  EXPECT_EQ(s.sample_ids, (std::vector<SampleId>{"a"}));
  EXPECT_EQ(s.excluded, 2u);
  EXPECT_DOUBLE_EQ(*s.mean, std::exp(-std::sqrt(2.0)));
}

TEST(BetweenPrediction, ClassificationAgreement) {
  const std::vector<std::optional<PredictionSet>> a{preds({0, 1, 0, 1}, true)};
  const std::vector<std::optional<PredictionSet>> flip{preds({1, 0, 1, 0}, true)};
  const std::vector<std::optional<PredictionSet>> half{preds({0, 1, 1, 0}, true)};
  EXPECT_DOUBLE_EQ(*between_prediction_classification(a, a), 1.0);
  EXPECT_DOUBLE_EQ(*between_prediction_classification(a, flip), 0.0);
  EXPECT_DOUBLE_EQ(*between_prediction_classification(a, half), 0.5);
}

TEST(BetweenPrediction, RegressionMinMaxPerRepeat) {
  // Repeat 0 pair MSEs: AB 1, AC 9, BC 4. Repeat 1: AB 4, AC 9, BC 1.
  const std::vector<std::vector<std::optional<PredictionSet>>> p{
      {preds({0}), preds({0})}, {preds({1}), preds({2})}, {preds({3}), preds({3})}};
  const auto r = between_prediction_regression(p);
  EXPECT_DOUBLE_EQ(r.scores(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(r.scores(0, 1), (1.0 + 0.625) / 2.0);
  EXPECT_DOUBLE_EQ(r.scores(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(r.scores(1, 2), (0.625 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(r.scores(2, 1), r.scores(1, 2));
  EXPECT_FALSE(r.degenerate);

  const auto per_pair = between_prediction_regression(p, MseScope::per_pair);
  EXPECT_DOUBLE_EQ(per_pair.scores(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(per_pair.scores(0, 2), 1.0);
  EXPECT_TRUE(per_pair.degenerate);
}

TEST(BetweenPrediction, MinMaxArithmetic) {
  // Four methods on a line give pair MSEs 0 (A,B), 25, 100 among others.
  const std::vector<std::vector<std::optional<PredictionSet>>> p{
      {preds({0})}, {preds({0})}, {preds({5})}, {preds({10})}};
  const auto r = between_prediction_regression(p);
  EXPECT_DOUBLE_EQ(r.scores(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(r.scores(0, 2), 0.75);
  EXPECT_DOUBLE_EQ(r.scores(0, 3), 0.0);
  EXPECT_DOUBLE_EQ(r.scores(2, 3), 0.75);
}

TEST(Accuracy, Examples) {
  auto p = preds({0, 1, 1, 0}, true);
  p.truth << 0, 1, 1, 1;
  EXPECT_DOUBLE_EQ(accuracy_classification(p), 0.75);
  p.truth = p.values;
  EXPECT_DOUBLE_EQ(accuracy_classification(p), 1.0);
  p.truth = Eigen::VectorXd::Ones(4) - p.values;
  EXPECT_DOUBLE_EQ(accuracy_classification(p), 0.0);

  auto r = preds({1, 2});
  r.truth << 1, 2;
  EXPECT_DOUBLE_EQ(accuracy_regression(r), 1.0);
  r.truth << 0, 3;
  EXPECT_DOUBLE_EQ(accuracy_regression(r), std::exp(-1.0));
  r.truth << 11, 12;
  EXPECT_LT(accuracy_regression(r), 1e-40);

  const ClusterLabeling truth{stabx::testing::row_ids(4), {0, 1, 0, 1}, 2};
  EXPECT_DOUBLE_EQ(accuracy_clustering(ClusterLabeling{stabx::testing::row_ids(4), {1, 0, 1, 0}, 2}, truth), 1.0);
  EXPECT_DOUBLE_EQ(accuracy_clustering(ClusterLabeling{stabx::testing::row_ids(4), {0, 0, 1, 1}, 2}, truth), -0.5);
}

TEST(Association, ConstantAndExactFits) {
  const std::vector<double> x{1, 2, 3, 4, 5}, flat{2, 2, 2, 2, 2};
  const auto f = fit_association(x, flat, 1);
  EXPECT_DOUBLE_EQ(f.slope, 0.0);
  EXPECT_DOUBLE_EQ(*f.t_statistic, 0.0);
  EXPECT_DOUBLE_EQ(*f.p_value, 1.0);

  const std::vector<double> x4{0, 1, 2, 3}, line{1, 3, 5, 7};
  const auto e = fit_association(x4, line, 1);
  EXPECT_NEAR(e.slope, 2.0, 1e-12);
  EXPECT_NEAR(e.intercept, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(*e.p_value, 0.0);

  const std::vector<double> two{1, 2};
  EXPECT_FALSE(fit_association(two, two, 1).p_value.has_value());
  EXPECT_FALSE(fit_association(flat, x, 1).valid);
}

TEST(Association, BonferroniAndTailProbability) {
  EXPECT_NEAR(bonferroni(0.04, 13), 0.52, 1e-15);
  EXPECT_DOUBLE_EQ(bonferroni(0.2, 13), 1.0);
  // Reference values of the two-sided Student t tail.
  EXPECT_NEAR(student_t_two_sided(2.0, 10), 0.0733880347707404, 1e-12);
  EXPECT_NEAR(student_t_two_sided(1.0, 1), 0.5, 1e-14);
  EXPECT_NEAR(student_t_two_sided(-2.0, 10), student_t_two_sided(2.0, 10), 1e-15);
}

TEST(Association, NoisyFitMatchesClosedForm) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6}, y{1.1, 1.9, 3.2, 3.8, 5.3, 5.9};
  const auto f = fit_association(x, y, 3);
  // Hand-computed OLS: sxx = 17.5, sxy = 17.4.
  EXPECT_NEAR(f.slope, 17.4 / 17.5, 1e-12);
  EXPECT_EQ(f.m_tests, 3u);
  EXPECT_NEAR(*f.p_corrected, std::min(1.0, 3.0 * *f.p_value), 1e-15);
  EXPECT_LT(*f.p_value, 1e-3);
}

TEST(Table, JsonRoundTripAndCsv) {
  StabilityTable t({"d1", "d2"}, {"m1", "m2"});
  t.at(0, 0) = TableCell{0.5, "ari", 3, 3, 3, 0, ""};
  t.at(1, 1) = TableCell{std::nullopt, "ari", 1, 3, 0, 0, "too many failed repeats"};
  const auto back = StabilityTable::from_json(t.to_json());
  EXPECT_EQ(back.to_json(), t.to_json());
  std::ostringstream out;
  t.write_csv(out);
  const std::string csv = out.str();
  EXPECT_NE(csv.find("d1,m1,ari,0.5,3,3,3,0,"), std::string::npos);
  EXPECT_NE(csv.find("d2,m2,ari,,1,3,0,0,too many failed repeats"), std::string::npos);
}
