#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "clplu/error.hpp"
#include "clplu/model.hpp"
#include "clplu/rng.hpp"

using namespace clplu;

TEST(InitModel, RangeAndZeroBias) {
  const auto m = init_model(103, 14, 1);
  EXPECT_EQ(m.weights().rows(), 14u);
  EXPECT_EQ(m.weights().cols(), 103u);
  const double bound = 1.0 / std::sqrt(103.0);
  for (const auto w : m.weights().values()) EXPECT_LE(std::abs(w), bound);
  for (const auto b : m.bias()) EXPECT_EQ(b, 0.0);
}

TEST(InitModel, Deterministic) {
  EXPECT_EQ(init_model(7, 3, 42), init_model(7, 3, 42));
  EXPECT_NE(init_model(7, 3, 42), init_model(7, 3, 43));
}

TEST(InitModel, ScalarCase) {
  const auto m = init_model(1, 1, 5);
  EXPECT_LE(std::abs(m.weights()(0, 0)), 1.0);
  EXPECT_EQ(m.bias()[0], 0.0);
}

TEST(PredictProbs, ZeroModelGivesHalf) {
  const LinearModel m(3, 4);
  for (const auto p : predict_probs(m, std::vector<double>{1.0, -2.0, 3.0})) EXPECT_EQ(p, 0.5);
}

TEST(PredictProbs, LargeBiasSaturatesWithoutOverflow) {
  LinearModel m(1, 2);
  m.bias() = {30.0, -800.0};
  const auto p = predict_probs(m, std::vector<double>{0.0});
  EXPECT_NEAR(p[0], 1.0, 1e-9);
  EXPECT_LT(p[0], 1.0);
  EXPECT_GT(p[1], 0.0);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(PredictProbs, LogThreeGivesThreeQuarters) {
  LinearModel m(RealMatrix(1, 1, 1.0), {0.0});
  EXPECT_NEAR(predict_probs(m, std::vector<double>{std::log(3.0)})[0], 0.75, 1e-15);
}

TEST(PredictProbs, Errors) {
  const LinearModel m(2, 2);
  EXPECT_THROW(predict_probs(m, std::vector<double>{1.0}), DataError);
  EXPECT_THROW(predict_probs(m, std::vector<double>{1.0, std::nan("")}), DataError);
}

TEST(PredictProbs, StrictlyInsideUnitIntervalForExtremeLogits) {
  for (const double t : {-1e308, -745.0, -50.0, 0.0, 40.0, 1e308}) {
    const double p = sigmoid(t);
    EXPECT_GT(p, 0.0) << t;
    EXPECT_LT(p, 1.0) << t;
  }
}

TEST(PredictProbs, DoublingParametersDoublesLogits) {
  Rng rng(3);
  RealMatrix w(3, 4);
  for (auto& v : w.values()) v = rng.normal();
  const std::vector<double> b{0.1, -0.2, 0.3};
  const LinearModel m(w, b);
  RealMatrix w2 = w;
  for (auto& v : w2.values()) v *= 2;
  const LinearModel m2(w2, {0.2, -0.4, 0.6});
  const std::vector<double> x{0.5, -1.0, 2.0, 0.25};
  const auto z = predict_logits(m, x);
  const auto p2 = predict_probs(m2, x);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(p2[j], sigmoid(2 * z[j]));
}

TEST(PredictLabels, ThresholdIsInclusive) {
  EXPECT_EQ(predict_labels(std::vector<double>{0.5}, 0.5), (std::vector<std::uint8_t>{1}));
  EXPECT_EQ(predict_labels(std::vector<double>{0.2, 0.8}, 0.5), (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(predict_labels(std::vector<double>{0.49999}, 0.5), (std::vector<std::uint8_t>{0}));
}

TEST(Model, RejectsNonFiniteParameters) {
  EXPECT_THROW(LinearModel(RealMatrix(1, 1, std::numeric_limits<double>::infinity()), {0.0}), DataError);
  EXPECT_THROW(LinearModel(RealMatrix(2, 1), {0.0}), DataError);
}

TEST(Checkpoint, JsonRoundTripIsExact) {
  const auto m = init_model(5, 3, 77);
  const CheckpointMeta meta{77, "plul", 120};
  const auto back = checkpoint_from_json(checkpoint_to_json(m, meta));
  EXPECT_EQ(back.model, m);
  EXPECT_EQ(back.meta.seed, 77u);
  EXPECT_EQ(back.meta.loss_mode, "plul");
  EXPECT_EQ(back.meta.epoch, 120u);

  const auto path = std::filesystem::temp_directory_path() / "clplu_model_test.json";
  save_checkpoint(m, meta, path);
  EXPECT_EQ(load_checkpoint(path).model, m);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsWrongShape) {
  EXPECT_THROW(checkpoint_from_json(R"({"d":2,"L":2,"W":[1,2,3],"b":[0,0]})"), DataError);
  EXPECT_THROW(checkpoint_from_json("not json"), DataError);
}
