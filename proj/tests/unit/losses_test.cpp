#include <gtest/gtest.h>

#include <cmath>

#include "clplu/conceal.hpp"
#include "clplu/error.hpp"
#include "clplu/losses.hpp"

using namespace clplu;

namespace {

const double kLn2 = std::log(2.0);

RealMatrix row(std::initializer_list<double> v) { return RealMatrix(1, v.size(), std::vector<double>(v)); }

BinaryMatrix bits(std::initializer_list<std::uint8_t> v) {
  return BinaryMatrix(1, v.size(), std::vector<std::uint8_t>(v));
}

}  // namespace

TEST(LossMode, ParseAndPrint) {
  for (const auto m : {LossMode::FullBce, LossMode::An, LossMode::Ap, LossMode::Plul}) {
    EXPECT_EQ(parse_loss_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_loss_mode("hinge"), ConfigError);
}

TEST(BceLoss, HalfEverywhere) {
  EXPECT_NEAR(bce_loss(row({0.5, 0.5}), bits({1, 0})).value, 2 * kLn2, 1e-15);
}

TEST(BceLoss, PerfectFitIsNearZero) {
  const auto r = bce_loss(row({1.0, 0.0, 1.0}), bits({1, 0, 1}));
  EXPECT_LE(r.value, 3 * -std::log(1 - kProbEpsilon) + 1e-18);
  EXPECT_GE(r.value, 0.0);
}

TEST(BceLoss, GradientIsResidualOverBatch) {
  RealMatrix p(2, 2, {0.2, 0.7, 0.9, 0.4});
  BinaryMatrix z(2, 2, {1, 0, 1, 1});
  const auto r = bce_loss(p, z);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 0), (0.2 - 1) / 2);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 1), 0.7 / 2);
  EXPECT_DOUBLE_EQ(r.grad_logits(1, 1), (0.4 - 1) / 2);
  EXPECT_TRUE(r.chosen_scenario.empty());
}

TEST(BceLoss, DimensionMismatch) {
  EXPECT_THROW(bce_loss(RealMatrix(1, 2), BinaryMatrix(1, 3)), DataError);
}

TEST(FuLoss, NoObservedLabelsIsZero) {
  const auto r = fu_loss(RealMatrix(3, 0), BinaryMatrix(3, 0));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.grad_logits.size(), 0u);
}

TEST(FuLoss, HandCase) {
  EXPECT_NEAR(fu_loss(row({0.75}), bits({1})).value, 0.2877, 1e-4);
  EXPECT_DOUBLE_EQ(fu_loss(row({0.75}), bits({1})).value, -std::log(0.75));
}

TEST(FuLoss, AllObservedEqualsBce) {
  RealMatrix p(2, 3, {0.1, 0.5, 0.8, 0.3, 0.6, 0.9});
  BinaryMatrix z(2, 3, {0, 1, 1, 1, 0, 1});
  EXPECT_EQ(fu_loss(p, z).value, bce_loss(p, z).value);
}

TEST(AnLoss, HalfMembers) {
  EXPECT_NEAR(an_loss(row({0.5, 0.5}), bits({1})).value, 2 * kLn2, 1e-15);
  EXPECT_NEAR(an_loss(row({0.5, 0.5}), bits({0})).value, 2 * kLn2, 1e-15);
}

TEST(AnLoss, ClampBoundsTheValue) {
  const auto r = an_loss(row({1.0, 0.0}), bits({1}));
  EXPECT_DOUBLE_EQ(r.value, -std::log(1.0 - (1.0 - kProbEpsilon)) - std::log(1.0 - kProbEpsilon));
  EXPECT_TRUE(std::isfinite(r.grad_logits(0, 0)));
}

TEST(AnLoss, TreatsEveryMemberAsNegative) {
  const auto r = an_loss(row({0.9, 0.3}), bits({1}));
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 1), 0.3);
}

TEST(ApLoss, SymmetricHalf) {
  EXPECT_NEAR(ap_loss(row({0.5, 0.5}), bits({0})).value, 2 * kLn2, 1e-15);
  EXPECT_NEAR(ap_loss(row({0.5, 0.5}), bits({1})).value, 2 * kLn2, 1e-15);
}

TEST(ApLoss, HandCase) {
  EXPECT_NEAR(ap_loss(row({0.9, 0.1}), bits({1})).value, 2.4079, 1e-4);
}

TEST(PlulLoss, SymmetricTieGoesToBothPositive) {
  const auto r = plul_loss(row({0.5, 0.5}), bits({1}));
  EXPECT_NEAR(r.value, 2 * kLn2, 1e-15);
  ASSERT_EQ(r.chosen_scenario.size(), 1u);
  EXPECT_EQ(r.chosen_scenario[0].scenario, Scenario::C);
}

TEST(PlulLoss, TieOrderIsConfigurable) {
  const auto r = plul_loss(row({0.5, 0.5}), bits({1}), TieOrder{Scenario::B, Scenario::A, Scenario::C});
  EXPECT_EQ(r.chosen_scenario.at(0).scenario, Scenario::B);
  EXPECT_THROW(plul_loss(row({0.5, 0.5}), bits({1}), TieOrder{Scenario::A, Scenario::A, Scenario::C}), ConfigError);
}

TEST(PlulLoss, PicksScenarioA) {
  const auto r = plul_loss(row({0.9, 0.1}), bits({1}));
  EXPECT_NEAR(r.value, 0.2107, 1e-4);
  EXPECT_DOUBLE_EQ(r.value, -(std::log(0.9) + std::log(1 - 0.1)));
  EXPECT_EQ(r.chosen_scenario.at(0).scenario, Scenario::A);
  // Gradient of scenario a only: s -> 1, p -> 0.
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 0), 0.9 - 1);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 1), 0.1);
}

TEST(PlulLoss, NegativeUnit) {
  const auto r = plul_loss(row({0.2, 0.3}), bits({0}));
  EXPECT_NEAR(r.value, 0.5798, 1e-4);
  EXPECT_TRUE(r.chosen_scenario.empty());
}

TEST(PlulLoss, ScenarioRecordedOnlyForPositiveUnits) {
  RealMatrix p(2, 4, {0.2, 0.7, 0.6, 0.6, 0.3, 0.3, 0.9, 0.8});
  BinaryMatrix v(2, 2, {1, 0, 0, 1});
  const auto r = plul_loss(p, v);
  ASSERT_EQ(r.chosen_scenario.size(), 2u);
  EXPECT_EQ(r.chosen_scenario[0].instance, 0u);
  EXPECT_EQ(r.chosen_scenario[0].unit, 0u);
  EXPECT_EQ(r.chosen_scenario[0].scenario, Scenario::B);
  EXPECT_EQ(r.chosen_scenario[1].instance, 1u);
  EXPECT_EQ(r.chosen_scenario[1].unit, 1u);
  EXPECT_EQ(r.chosen_scenario[1].scenario, Scenario::C);
  EXPECT_EQ(r.scenario_counts(), (ScenarioCounts{0, 1, 1}));
}

TEST(UnitLosses, ClampKeepsEverythingFinite) {
  for (const double ps : {0.0, 1.0}) {
    for (const double pp : {0.0, 1.0}) {
      for (const std::uint8_t v : {0, 1}) {
        for (const auto& r : {an_loss(row({ps, pp}), bits({v})), ap_loss(row({ps, pp}), bits({v})),
                              plul_loss(row({ps, pp}), bits({v}))}) {
          EXPECT_TRUE(std::isfinite(r.value));
          EXPECT_GE(r.value, 0.0);
          for (const auto g : r.grad_logits.values()) EXPECT_TRUE(std::isfinite(g));
        }
      }
    }
  }
}

TEST(UnitLosses, MemberShapeMismatch) {
  EXPECT_THROW(an_loss(RealMatrix(1, 3), BinaryMatrix(1, 1)), DataError);
  EXPECT_THROW(ap_loss(RealMatrix(2, 2), BinaryMatrix(1, 1)), DataError);
  EXPECT_THROW(plul_loss(RealMatrix(1, 2), BinaryMatrix(1, 2)), DataError);
}

namespace {

// One instance, labels {0: observed, 1: partner, 2: privacy}.
ConcealedDataset hand_dataset() {
  const auto features = std::make_shared<const RealMatrix>(1, 1, 1.0);
  return ConcealedDataset(features, PluScheme(3, {{1, 2}}), {0}, BinaryMatrix(1, 1, 1), BinaryMatrix(1, 1, 1),
                          IndexMatrix(1, 1, 1));
}

}  // namespace

TEST(ClpluRisk, HandCase) {
  const auto data = hand_dataset();
  const auto r = clplu_risk(row({0.75, 0.9, 0.1}), data, LossMode::Plul);
  EXPECT_NEAR(r.value, 0.4984, 1e-4);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 0), 0.75 - 1);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 1), 0.9 - 1);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 2), 0.1);
}

TEST(ClpluRisk, RejectsFullBce) {
  EXPECT_THROW(clplu_risk(row({0.5, 0.5, 0.5}), hand_dataset(), LossMode::FullBce), ConfigError);
}

TEST(ClpluRisk, ZeroUnitsEqualsBce) {
  const auto features = std::make_shared<const RealMatrix>(2, 1, 1.0);
  BinaryMatrix z(2, 3, {1, 0, 1, 0, 0, 1});
  const ConcealedDataset data(features, PluScheme(3, {}), {0, 1, 2}, z, BinaryMatrix(2, 0), IndexMatrix(2, 0));
  RealMatrix p(2, 3, {0.3, 0.6, 0.8, 0.1, 0.4, 0.55});
  const auto ref = bce_loss(p, z);
  for (const auto mode : {LossMode::An, LossMode::Ap, LossMode::Plul}) {
    const auto r = clplu_risk(p, data, mode);
    EXPECT_EQ(r.value, ref.value);
    EXPECT_EQ(r.grad_logits, ref.grad_logits);
  }
}

TEST(ClpluRisk, ScenarioInstancesUseDatasetRows) {
  const auto features = std::make_shared<const RealMatrix>(3, 1, 1.0);
  const ConcealedDataset data(features, PluScheme(2, {{0, 1}}), {}, BinaryMatrix(3, 0),
                              BinaryMatrix(3, 1, std::vector<std::uint8_t>{0, 1, 1}), IndexMatrix(3, 1, 0));
  const std::size_t rows[] = {2, 0};
  const auto r = clplu_risk(RealMatrix(2, 2, 0.5), data, rows, LossMode::Plul);
  ASSERT_EQ(r.chosen_scenario.size(), 1u);
  EXPECT_EQ(r.chosen_scenario[0].instance, 2u);
}
