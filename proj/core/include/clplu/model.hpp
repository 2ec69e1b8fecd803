#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "clplu/matrix.hpp"

namespace clplu {

/// Single-layer linear multi-label classifier: p_j = sigmoid(W_j . x + b_j).
class LinearModel {
 public:
  LinearModel() = default;
  /// Zero weights and bias.
  LinearModel(std::size_t num_features, std::size_t num_labels);
  /// W is L x d, b has L entries; all entries must be finite.
  LinearModel(RealMatrix weights, std::vector<double> bias);

  std::size_t num_features() const noexcept { return weights_.cols(); }
  std::size_t num_labels() const noexcept { return weights_.rows(); }

  const RealMatrix& weights() const noexcept { return weights_; }
  RealMatrix& weights() noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  std::vector<double>& bias() noexcept { return bias_; }

  bool operator==(const LinearModel&) const = default;

 private:
  RealMatrix weights_;
  std::vector<double> bias_;
};

/// W ~ U(-1/sqrt(d), 1/sqrt(d)), b = 0.
LinearModel init_model(std::size_t num_features, std::size_t num_labels, std::uint64_t seed);

/// Logistic function, evaluated on the branch that cannot overflow. The
/// result is kept strictly inside (0,1): saturated values are pinned to the
/// nearest representable neighbours of 0 and 1.
inline double sigmoid(double t) noexcept {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  double p;
  if (t >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-t));
  } else {
    const double e = std::exp(t);
    p = e / (1.0 + e);
  }
  return p < lo ? lo : (p > hi ? hi : p);
}

/// W x + b for one instance.
std::vector<double> predict_logits(const LinearModel& model, std::span<const double> x);
std::vector<double> predict_probs(const LinearModel& model, std::span<const double> x);

/// Logits for the listed rows of `features` (n_rows x L).
RealMatrix batch_logits(const LinearModel& model, const RealMatrix& features, std::span<const std::size_t> rows);
/// Probabilities for every row of `features`.
RealMatrix predict_probs(const LinearModel& model, const RealMatrix& features);

/// 1 where p >= threshold.
std::vector<std::uint8_t> predict_labels(std::span<const double> probs, double threshold);
BinaryMatrix predict_labels(const RealMatrix& probs, double threshold);

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::string loss_mode;
  std::size_t epoch = 0;
};

struct Checkpoint {
  LinearModel model;
  CheckpointMeta meta;
};

/// {"d":..,"L":..,"W":[row-major],"b":[..],"metadata":{"seed","loss_mode","epoch"}}
std::string checkpoint_to_json(const LinearModel& model, const CheckpointMeta& meta);
Checkpoint checkpoint_from_json(std::string_view text);
void save_checkpoint(const LinearModel& model, const CheckpointMeta& meta, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace clplu
