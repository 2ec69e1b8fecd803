#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/dataset.hpp"
#include "clplu/harness/config.hpp"
#include "clplu/metrics.hpp"
#include "clplu/model.hpp"
#include "clplu/trainer.hpp"

namespace clplu::harness {

/// Split, scheme and concealed views of one dataset under one config.
struct PreparedExperiment {
  MultiLabelDataset dataset;
  SplitIndices split;
  PluScheme scheme;
  ConcealResult train;
  ConcealResult val;
  ConcealResult test;
  /// Unit-free views of the train and validation splits, for the fully supervised reference.
  ConcealResult train_full;
  ConcealResult val_full;

  EvaluationSet test_set() const { return {&test.data, &test.truth}; }
};

/// Privacy labels from the config (explicit or sampled) paired by build_scheme.
PluScheme make_scheme(const ExperimentConfig& cfg, std::size_t num_labels);

/// Optional min-max scaling is fitted on the training split only.
PreparedExperiment prepare_experiment(const MultiLabelDataset& ds, const ExperimentConfig& cfg);

struct GridRun {
  TrainConfig config;
  LinearModel model;
  TrainHistory history;
  /// Validation metrics after the final epoch.
  MetricsReport validation;
};

struct GridResult {
  LossMode mode = LossMode::Plul;
  std::vector<GridRun> runs;
  std::size_t best = 0;

  const GridRun& winner() const { return runs.at(best); }
};

using RunCallback = std::function<void(const GridRun&)>;

/// Trains every grid cell and selects the winner. FullBce cells train on the
/// unit-free views; the others on the concealed training split.
GridResult run_grid(const PreparedExperiment& prep, const ExperimentConfig& cfg, LossMode mode,
                    const RunCallback& on_run = {});

/// Grid-search on the concealed training split given directly.
GridResult run_grid(const ConcealedDataset& train, const EvaluationSet& validation, const ExperimentConfig& cfg,
                    LossMode mode, const RunCallback& on_run = {});

/// "bs32_lr0.01_wd0.0001"
std::string run_name(const TrainConfig& cfg);

}  // namespace clplu::harness
