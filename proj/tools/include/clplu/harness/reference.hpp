#pragma once

// Published results for the desk-scale benchmark datasets, as fractions.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "clplu/losses.hpp"

namespace clplu::harness {

struct PublishedMetrics {
  double average_precision;
  double hamming_loss;
  double one_error;
  double coverage;
  double ranking_loss;
};

struct PublishedAblation {
  std::vector<std::size_t> unit_counts;
  /// Average precision of the all-negative baseline and of PLUL per unit count.
  std::vector<double> an;
  std::vector<double> plul;
};

struct DatasetReference {
  std::string_view name;
  std::size_t num_instances;
  std::size_t num_features;
  std::size_t num_labels;
  double cardinality;
  PublishedMetrics plul;
  PublishedMetrics an;
  PublishedMetrics ap;
  PublishedMetrics full_bce;
  PublishedAblation ablation;  ///< empty when not published

  const PublishedMetrics& for_mode(LossMode mode) const;
};

std::span<const DatasetReference> known_datasets();
/// nullptr for unknown names.
const DatasetReference* find_dataset(std::string_view name);

}  // namespace clplu::harness
