#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "checks.hpp"
#include "clplu/losses.hpp"
#include "clplu/rng.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace clplu;

TEST(LossProperty, AnalyticGradientsMatchFiniteDifferences) {
  for (const auto mode : {LossMode::FullBce, LossMode::An, LossMode::Ap, LossMode::Plul}) {
    EXPECT_LT(checks::max_gradient_error(mode, 7, 50), 1e-4) << to_string(mode);
  }
}

TEST(LossProperty, PlulGridMatchesBruteForce) {
  const auto r = checks::plul_grid();
  EXPECT_EQ(r.cells, 162u);
  EXPECT_EQ(r.mismatches, 0u);
}

TEST(LossProperty, PlulNeverExceedsAssumePositive) {
  EXPECT_EQ(checks::plul_above_ap(11, 200), 0u);
}

TEST(LossProperty, PlulIsTheMinimumOfTheScenarios) {
  Rng rng(13);
  const auto probs = gen::probabilities(rng, 50, 6);
  const BinaryMatrix ones(50, 3, 1);
  const auto r = plul_loss(probs, ones);
  double expected = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t u = 0; u < 3; ++u) {
      const auto risks = oracle::scenario_risks(probs(i, 2 * u), probs(i, 2 * u + 1));
      const double lowest = std::min({risks[0], risks[1], risks[2]});
      const auto single = plul_loss(RealMatrix(1, 2, std::vector<double>{probs(i, 2 * u), probs(i, 2 * u + 1)}),
                                    BinaryMatrix(1, 1, 1));
      EXPECT_EQ(single.value, lowest);
      for (const double risk : risks) EXPECT_LE(single.value, risk);
      expected += lowest;
    }
  }
  EXPECT_NEAR(r.value, expected / 50, 1e-12);
  EXPECT_EQ(r.chosen_scenario.size(), 150u);
}

TEST(LossProperty, UnitOffGivesTheSameValueForEveryUnitLoss) {
  Rng rng(19);
  for (int t = 0; t < 50; ++t) {
    const auto n = gen::between(rng, 1, 8);
    const auto m = gen::between(rng, 1, 4);
    const auto probs = gen::probabilities(rng, n, 2 * m);
    const BinaryMatrix zeros(n, m, 0);
    const auto an = an_loss(probs, zeros);
    const auto ap = ap_loss(probs, zeros);
    const auto plul = plul_loss(probs, zeros);
    EXPECT_EQ(an.value, ap.value);
    EXPECT_EQ(an.value, plul.value);
    EXPECT_EQ(an.grad_logits, ap.grad_logits);
    EXPECT_EQ(an.grad_logits, plul.grad_logits);
    EXPECT_TRUE(plul.chosen_scenario.empty());
  }
}

TEST(LossProperty, NonNegativeAndFiniteEvenAtTheBoundaries) {
  Rng rng(23);
  const double extremes[] = {0.0, 1.0, 1e-300, 1.0 - 1e-16, 0.5};
  for (int t = 0; t < 200; ++t) {
    const auto n = gen::between(rng, 1, 5);
    const auto m = gen::between(rng, 1, 3);
    RealMatrix probs(n, 2 * m);
    for (auto& v : probs.values()) v = rng.uniform01() < 0.5 ? extremes[rng.uniform_index(5)] : rng.uniform01();
    const auto units = gen::bits(rng, n, m, 0.5);
    for (const auto& r : {an_loss(probs, units), ap_loss(probs, units), plul_loss(probs, units)}) {
      EXPECT_GE(r.value, 0.0);
      EXPECT_TRUE(std::isfinite(r.value));
      for (const auto g : r.grad_logits.values()) EXPECT_TRUE(std::isfinite(g));
    }
    const auto labels = gen::bits(rng, n, 2 * m, 0.5);
    const auto bce = bce_loss(probs, labels);
    EXPECT_GE(bce.value, 0.0);
    EXPECT_TRUE(std::isfinite(bce.value));
  }
}

TEST(LossProperty, BceMatchesOracle) {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    const auto n = gen::between(rng, 1, 10);
    const auto L = gen::between(rng, 1, 10);
    const auto p = gen::probabilities(rng, n, L);
    const auto z = gen::bits(rng, n, L);
    EXPECT_NEAR(bce_loss(p, z).value, oracle::bce(p, z), 1e-12);
  }
}

TEST(LossProperty, RiskWithoutUnitsIsBce) {
  Rng rng(43);
  for (int t = 0; t < 50; ++t) {
    const auto n = gen::between(rng, 1, 10);
    const auto L = gen::between(rng, 2, 10);
    const auto ds = gen::dataset(rng, n, 1, L);
    const auto c = conceal(ds, PluScheme(L, {}));
    const auto p = gen::probabilities(rng, n, L);
    const auto bce = bce_loss(p, ds.labels());
    for (const auto mode : {LossMode::An, LossMode::Ap, LossMode::Plul}) {
      const auto r = clplu_risk(p, c.data, mode);
      EXPECT_EQ(r.value, bce.value) << to_string(mode);
      EXPECT_EQ(r.grad_logits, bce.grad_logits) << to_string(mode);
    }
  }
}

TEST(LossProperty, RiskDecomposesIntoObservedAndUnitParts) {
  Rng rng(47);
  for (int t = 0; t < 50; ++t) {
    const auto b = checks::random_batch(rng, true);
    const auto& data = b.concealed.data;
    const auto probs = checks::sigmoid_of(b.logits);
    const auto n = data.num_instances();
    RealMatrix obs(n, data.num_observed());
    RealMatrix members(n, 2 * data.num_units());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < data.num_observed(); ++k) obs(i, k) = probs(i, data.observed_index()[k]);
      for (std::size_t u = 0; u < data.num_units(); ++u) {
        members(i, 2 * u) = probs(i, data.partner(i, u));
        members(i, 2 * u + 1) = probs(i, data.privacy(u));
      }
    }
    const double fu = oracle::bce(obs, data.observed_labels());
    EXPECT_NEAR(clplu_risk(probs, data, LossMode::Plul).value, fu + plul_loss(members, data.plu_values()).value, 1e-10);
    EXPECT_NEAR(clplu_risk(probs, data, LossMode::An).value, fu + an_loss(members, data.plu_values()).value, 1e-10);
    EXPECT_NEAR(clplu_risk(probs, data, LossMode::Ap).value, fu + ap_loss(members, data.plu_values()).value, 1e-10);
  }
}
