#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/losses.hpp"
#include "clplu/metrics.hpp"
#include "clplu/model.hpp"

namespace clplu {

struct TrainConfig {
  std::size_t epochs = 120;
  std::size_t batch_size = 32;
  double lr = 0.1;
  /// 1-based: the rate is multiplied by lr_decay_factor after each listed epoch.
  std::vector<std::size_t> lr_decay_epochs{40, 60, 100};
  double lr_decay_factor = 0.1;
  double weight_decay = 1e-4;
  LossMode loss_mode = LossMode::Plul;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  bool use_bias = true;
  TieOrder tie_order = kDefaultTieOrder;

  /// Throws ConfigError.
  void validate() const;
};

/// Learning rate used during `epoch` (1-based).
double scheduled_lr(const TrainConfig& cfg, std::size_t epoch);

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  /// Mean per-instance training objective over the epoch.
  double train_loss = 0.0;
  std::optional<MetricsReport> val_metrics;
  ScenarioCounts scenario_counts;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  LinearModel model;
  TrainHistory history;
};

/// Minibatch SGD. Each epoch draws a seeded permutation, then for every batch
///   W <- W - lr * (grad_W + weight_decay * W),   b <- b - lr * grad_b.
/// The bias is not decayed. The last partial batch is kept.
///
/// FullBce requires a dataset without units (all labels observed); the unit
/// modes use clplu_risk. Throws NumericalError on a non-finite loss.
/// The result depends only on (train_set, cfg).
TrainResult train(const ConcealedDataset& train_set, const EvaluationSet* validation, const TrainConfig& cfg);

struct CandidateRun {
  TrainConfig config;
  MetricsReport validation;
};

/// Best validation average precision; ties go to the lower ranking loss, then
/// to the lexicographically smaller (batch_size, lr, weight_decay, seed).
std::size_t model_select(std::span<const CandidateRun> candidates);

/// One JSON object per line: {epoch, lr, train_loss, val_metrics{...}, scenario_counts{a,b,c}}.
std::string epoch_record_to_json(const EpochRecord& record);

}  // namespace clplu
