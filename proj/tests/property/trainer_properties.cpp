#include <gtest/gtest.h>

#include "checks.hpp"
#include "clplu/conceal.hpp"
#include "clplu/synthetic.hpp"
#include "clplu/trainer.hpp"

using namespace clplu;

namespace {

MultiLabelDataset small(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = 60;
  spec.d = 5;
  spec.L = 6;
  spec.seed = seed;
  return make_synthetic(spec);
}

}  // namespace

TEST(TrainerProperty, UnitFreeRunsMatchFullBceExactly) {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    EXPECT_EQ(checks::reduction_mismatches(small(seed), seed, 9), 0u) << "seed " << seed;
  }
}

TEST(TrainerProperty, SameSeedSameModel) {
  for (const std::uint64_t seed : {4u, 5u}) {
    const auto ds = small(seed);
    const auto c = conceal(ds, build_scheme(6, sample_privacy_indices(6, 2, seed), PairingMode::PerInstance, seed));
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 7;
    cfg.lr_decay_epochs = {2, 4};
    cfg.seed = seed;
    for (const auto mode : {LossMode::An, LossMode::Ap, LossMode::Plul}) {
      cfg.loss_mode = mode;
      const EvaluationSet val{&c.data, &c.truth};
      const auto a = train(c.data, &val, cfg);
      const auto b = train(c.data, &val, cfg);
      EXPECT_TRUE(a.model == b.model) << to_string(mode);
      for (std::size_t e = 0; e < cfg.epochs; ++e) {
        EXPECT_EQ(epoch_record_to_json(a.history.epochs[e]), epoch_record_to_json(b.history.epochs[e]));
      }
      cfg.seed = seed + 100;
      EXPECT_FALSE(train(c.data, &val, cfg).model == a.model) << to_string(mode);
      cfg.seed = seed;
    }
  }
}

TEST(TrainerProperty, ScheduleIsPiecewiseConstantAndNonIncreasing) {
  TrainConfig cfg;
  double prev = scheduled_lr(cfg, 1);
  for (std::size_t e = 2; e <= cfg.epochs; ++e) {
    const double lr = scheduled_lr(cfg, e);
    EXPECT_LE(lr, prev);
    prev = lr;
  }
}
