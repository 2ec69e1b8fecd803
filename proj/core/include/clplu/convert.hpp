#pragma once

// Converters from public multi-label formats into MultiLabelDataset.

#include <cstddef>
#include <istream>
#include <string>

#include "clplu/dataset.hpp"

namespace clplu {

/// Mulan-style ARFF: numeric feature attributes plus `num_labels` binary
/// label attributes, placed either after the features (Mulan default) or
/// before them. Dense and sparse (`{idx value, ...}`) data rows are accepted.
struct ArffOptions {
  std::size_t num_labels = 0;
  bool labels_first = false;
};

MultiLabelDataset read_arff(std::istream& in, const ArffOptions& options, const std::string& source);

/// LIBSVM multi-label text: `<l>,<l>,... <feat>:<val> ...` per line.
/// Zero sizes mean "infer from the data" (max index + 1).
struct LibsvmOptions {
  std::size_t num_labels = 0;
  std::size_t num_features = 0;
  bool one_based_features = true;
};

MultiLabelDataset read_libsvm_multilabel(std::istream& in, const LibsvmOptions& options, const std::string& source);

}  // namespace clplu
