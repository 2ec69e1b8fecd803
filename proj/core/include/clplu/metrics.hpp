#pragma once

// Multi-label evaluation metrics.
//
// Ranks are descending by score. Tied scores share the pessimistic rank:
//   rank(j) = |{k : s_k >= s_j}|
// so that average precision stays in [0,1] and equals 1 exactly when the
// ranking loss is 0. One-error picks the top-scored label, lowest index first
// among ties. Ranking loss counts a tied (positive, negative) pair as 1/2.
//
// Per-instance eligibility: ranking loss needs >= 1 positive and >= 1
// negative; one-error, coverage and average precision need >= 1 positive.
// Ineligible instances are skipped and counted. Coverage is normalised by
// L - 1 so it lies in [0,1].

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/matrix.hpp"
#include "clplu/model.hpp"

namespace clplu {

struct MetricValue {
  double value = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Fraction of label positions where prediction and truth differ.
double hamming_loss(const BinaryMatrix& predictions, const BinaryMatrix& truth);
MetricValue ranking_loss(const RealMatrix& scores, const BinaryMatrix& truth);
MetricValue one_error(const RealMatrix& scores, const BinaryMatrix& truth);
MetricValue coverage(const RealMatrix& scores, const BinaryMatrix& truth);
MetricValue average_precision(const RealMatrix& scores, const BinaryMatrix& truth);

/// Accuracy over the n x 2m hidden positions (partner and privacy label of
/// every unit) of thresholded probabilities. `probs` is n x L.
double plu_label_accuracy(const RealMatrix& probs, const ConcealedDataset& data, const SealedTruth& truth,
                          double threshold);

struct MetricsReport {
  double average_precision = 0.0;
  double hamming_loss = 0.0;
  double one_error = 0.0;
  double coverage = 0.0;
  double ranking_loss = 0.0;
  std::optional<double> plu_label_accuracy;
  /// Instances with >= 1 positive and >= 1 negative; the four ranking
  /// metrics are averaged over these only.
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;
};

/// Hamming loss over every instance; ranking metrics over eligible instances.
MetricsReport compute_report(const RealMatrix& scores, const BinaryMatrix& truth, double threshold);

/// Concealed data plus, optionally, its sealed truth.
struct EvaluationSet {
  const ConcealedDataset* data = nullptr;
  const SealedTruth* truth = nullptr;
};

/// With sealed truth: metrics over all L labels plus plu_label_accuracy.
/// Without it: metrics over the observed labels only; plu_label_accuracy absent.
MetricsReport evaluate(const LinearModel& model, const EvaluationSet& set, double threshold);

/// Keys: average_precision, hamming_loss, one_error, coverage, ranking_loss,
/// plu_label_accuracy (omitted when absent), n_evaluated, n_skipped.
std::string report_to_json(const MetricsReport& report, int indent = 2);
MetricsReport report_from_json(const std::string& text);

}  // namespace clplu
