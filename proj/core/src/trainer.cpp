#include "clplu/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <string>
#include <tuple>

#include "clplu/error.hpp"
#include "clplu/rng.hpp"

namespace clplu {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0)) throw ConfigError("lr_decay_factor must lie in (0,1]");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ConfigError("weight_decay must be >= 0");
  if (!std::ranges::is_sorted(lr_decay_epochs)) throw ConfigError("lr_decay_epochs must be sorted");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
}

double scheduled_lr(const TrainConfig& cfg, std::size_t epoch) {
  double lr = cfg.lr;
  for (const auto boundary : cfg.lr_decay_epochs) {
    if (boundary < epoch) lr *= cfg.lr_decay_factor;
  }
  return lr;
}

namespace {

LossResult batch_loss(const ConcealedDataset& data, std::span<const std::size_t> rows, const RealMatrix& probs,
                      const TrainConfig& cfg) {
  if (cfg.loss_mode != LossMode::FullBce) return clplu_risk(probs, data, rows, cfg.loss_mode, cfg.tie_order);
  // Fully supervised: every label is observed, in original order.
  BinaryMatrix labels(rows.size(), data.num_labels());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < data.num_observed(); ++k) {
      labels(r, data.observed_index()[k]) = data.observed_labels()(rows[r], k);
    }
  }
  return bce_loss(probs, labels);
}

}  // namespace

TrainResult train(const ConcealedDataset& train_set, const EvaluationSet* validation, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.loss_mode == LossMode::FullBce && train_set.num_units() != 0) {
    throw ConfigError("full_bce training needs fully observed labels (a scheme with zero units)");
  }
  if (validation && validation->data) {
    const auto& v = *validation->data;
    if (v.num_features() != train_set.num_features() || !(v.scheme() == train_set.scheme())) {
      throw DataError("training and validation sets must share the scheme and feature dimension");
    }
  }
  const auto n = train_set.num_instances();
  const auto d = train_set.num_features();
  const auto L = train_set.num_labels();
  const auto& x = train_set.features();

  TrainResult result{init_model(d, L, derive_seed(cfg.seed, 1)), {}};
  auto& W = result.model.weights();
  auto& b = result.model.bias();

  Rng shuffle_rng(derive_seed(cfg.seed, 2));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RealMatrix grad_w(L, d);
  std::vector<double> grad_b(L);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = scheduled_lr(cfg, epoch);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    EpochRecord record;
    record.epoch = epoch;
    record.lr = lr;
    double loss_sum = 0.0;

    for (std::size_t start = 0, batch = 0; start < n; start += cfg.batch_size, ++batch) {
      const auto rows = std::span<const std::size_t>(order).subspan(start, std::min(cfg.batch_size, n - start));
      auto probs = batch_logits(result.model, x, rows);
      for (auto& v : probs.values()) v = sigmoid(v);
      const auto loss = batch_loss(train_set, rows, probs, cfg);
      if (!std::isfinite(loss.value)) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch));
      }
      loss_sum += loss.value * static_cast<double>(rows.size());
      record.scenario_counts += loss.scenario_counts();

      // grad_W = G^T X_batch, grad_b = column sums of G.
      grad_w.fill(0.0);
      std::ranges::fill(grad_b, 0.0);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto xi = x.row(rows[r]);
        for (std::size_t j = 0; j < L; ++j) {
          const double g = loss.grad_logits(r, j);
          if (g == 0.0) continue;
          grad_b[j] += g;
          auto gw = grad_w.row(j);
          for (std::size_t k = 0; k < d; ++k) gw[k] += g * xi[k];
        }
      }
      for (std::size_t j = 0; j < L; ++j) {
        auto w = W.row(j);
        const auto gw = grad_w.row(j);
        for (std::size_t k = 0; k < d; ++k) w[k] -= lr * (gw[k] + cfg.weight_decay * w[k]);
        if (cfg.use_bias) b[j] -= lr * grad_b[j];
      }
    }
    for (const auto v : W.values()) {
      if (!std::isfinite(v)) throw NumericalError("non-finite weight after epoch " + std::to_string(epoch));
    }
    record.train_loss = loss_sum / static_cast<double>(n);
    if (validation && validation->data) record.val_metrics = evaluate(result.model, *validation, cfg.threshold);
    result.history.epochs.push_back(std::move(record));
  }
  return result;
}

std::size_t model_select(std::span<const CandidateRun> candidates) {
  if (candidates.empty()) throw ConfigError("model_select: no candidate runs");
  auto key = [](const TrainConfig& c) { return std::tuple(c.batch_size, c.lr, c.weight_decay, c.seed); };
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const auto& a = candidates[k].validation;
    const auto& b = candidates[best].validation;
    if (a.average_precision != b.average_precision) {
      if (a.average_precision > b.average_precision) best = k;
    } else if (a.ranking_loss != b.ranking_loss) {
      if (a.ranking_loss < b.ranking_loss) best = k;
    } else if (key(candidates[k].config) < key(candidates[best].config)) {
      best = k;
    }
  }
  return best;
}

std::string epoch_record_to_json(const EpochRecord& record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["lr"] = record.lr;
  j["train_loss"] = record.train_loss;
  j["val_metrics"] = record.val_metrics ? nlohmann::ordered_json::parse(report_to_json(*record.val_metrics, -1))
                                        : nlohmann::ordered_json::object();
  j["scenario_counts"] = {{"a", record.scenario_counts.a},
                          {"b", record.scenario_counts.b},
                          {"c", record.scenario_counts.c}};
  return j.dump();
}

}  // namespace clplu
