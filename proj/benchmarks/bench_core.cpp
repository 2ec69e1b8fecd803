#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/losses.hpp"
#include "clplu/metrics.hpp"
#include "clplu/model.hpp"
#include "clplu/rng.hpp"
#include "clplu/synthetic.hpp"
#include "clplu/trainer.hpp"

using namespace clplu;

namespace {

// yeast-shaped data with two units.
struct Fixture {
  MultiLabelDataset ds;
  ConcealResult concealed;
  LinearModel model;

  explicit Fixture(std::size_t n)
      : ds(make_synthetic({n, 103, 14, 4.2, 0.3, 1})),
        concealed(conceal(ds, build_scheme(14, sample_privacy_indices(14, 2, 1), PairingMode::DatasetFixed, 1))),
        model(init_model(103, 14, 1)) {}
};

RealMatrix random_probs(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  RealMatrix p(rows, cols);
  for (auto& v : p.values()) v = rng.uniform(0.01, 0.99);
  return p;
}

}  // namespace

static void BM_ClpluRisk(benchmark::State& state) {
  const auto mode = static_cast<LossMode>(state.range(0));
  const Fixture f(256);
  const auto probs = random_probs(256, 14, 2);
  for (auto _ : state) benchmark::DoNotOptimize(clplu_risk(probs, f.concealed.data, mode));
  state.SetItemsProcessed(state.iterations() * 256);
  state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_ClpluRisk)->Arg(static_cast<int>(LossMode::An))->Arg(static_cast<int>(LossMode::Plul));

static void BM_PlulUnits(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto probs = random_probs(n, 10, 3);
  const BinaryMatrix units(n, 5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(plul_loss(probs, units));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 5);
}
BENCHMARK(BM_PlulUnits)->Range(64, 4096);

static void BM_BatchLogits(benchmark::State& state) {
  const Fixture f(2048);
  std::vector<std::size_t> rows(static_cast<std::size_t>(state.range(0)));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (auto _ : state) benchmark::DoNotOptimize(batch_logits(f.model, f.ds.features(), rows));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchLogits)->Arg(32)->Arg(256);

static void BM_ComputeReport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Fixture f(n);
  const auto probs = predict_probs(f.model, f.ds.features());
  for (auto _ : state) benchmark::DoNotOptimize(compute_report(probs, f.ds.labels(), 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ComputeReport)->Arg(241)->Arg(2417);

static void BM_TrainEpoch(benchmark::State& state) {
  const Fixture f(1935);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = static_cast<std::size_t>(state.range(0));
  cfg.lr_decay_epochs = {};
  for (auto _ : state) benchmark::DoNotOptimize(train(f.concealed.data, nullptr, cfg));
}
BENCHMARK(BM_TrainEpoch)->Arg(8)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
