#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clplu/matrix.hpp"

namespace clplu {

/// On-disk dataset formats.
///
/// SparseMl:
///   #n=<n> d=<d> L=<L>
///   [#labels <name>,<name>,...]
///   <label>,<label>,...|<feat>:<val> <feat>:<val> ...
/// One instance per line, 0-based indices, an empty label list is allowed.
/// Other lines starting with '#' are ignored by the plain reader.
///
/// DenseCsv:
///   y0,...,y{L-1},x0,...,x{d-1}
///   one row of L binary labels followed by d feature values per instance.
enum class DataFormat { SparseMl, DenseCsv };

DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat format);

/// Feature matrix plus full binary label matrix.
///
/// Immutable after construction. The feature matrix is shared, so subsets and
/// concealed views can reference it without copying.
class MultiLabelDataset {
 public:
  /// Validates: n >= 1, d >= 1, L >= 2, binary labels, finite features.
  MultiLabelDataset(RealMatrix features, BinaryMatrix labels, std::vector<std::string> label_names = {});

  std::size_t num_instances() const noexcept { return labels_.rows(); }
  std::size_t num_features() const noexcept { return features_->cols(); }
  std::size_t num_labels() const noexcept { return labels_.cols(); }

  const RealMatrix& features() const noexcept { return *features_; }
  const std::shared_ptr<const RealMatrix>& shared_features() const noexcept { return features_; }
  const BinaryMatrix& labels() const noexcept { return labels_; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }

  /// Rows `indices`, in the given order.
  MultiLabelDataset subset(std::span<const std::size_t> indices) const;

 private:
  std::shared_ptr<const RealMatrix> features_;
  BinaryMatrix labels_;
  std::vector<std::string> label_names_;
};

std::vector<std::string> default_label_names(std::size_t num_labels);

MultiLabelDataset load_dataset(const std::filesystem::path& path, DataFormat format);
MultiLabelDataset read_dataset(std::istream& in, DataFormat format, const std::string& source_name);

/// Writes doubles in shortest round-trip form; zero features are omitted in SparseMl.
void write_dataset(const MultiLabelDataset& ds, std::ostream& out, DataFormat format);
void save_dataset(const MultiLabelDataset& ds, const std::filesystem::path& path, DataFormat format);

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  std::uint64_t seed = 0;

  /// Each fraction in (0,1), sum within 1e-9 of 1. Throws ConfigError.
  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Seeded partition of {0..n-1}. Val and test get floor(n * frac) instances,
/// train gets the remainder. Each part is returned in ascending order.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct DatasetSplit {
  MultiLabelDataset train;
  MultiLabelDataset val;
  MultiLabelDataset test;
};

DatasetSplit split_dataset(const MultiLabelDataset& ds, const SplitSpec& spec);

/// Mean number of positive labels per instance.
double label_cardinality(const MultiLabelDataset& ds);

/// Per-feature min-max parameters, fitted on one dataset and applied to others.
struct MinMaxScaling {
  std::vector<double> min;
  std::vector<double> max;
};

MinMaxScaling fit_minmax(const RealMatrix& features);
/// Maps each feature to [0,1] on the fitted range; constant features map to 0.
RealMatrix apply_minmax(const RealMatrix& features, const MinMaxScaling& scaling);

}  // namespace clplu
