#include "clplu/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clplu/error.hpp"
#include "clplu/rng.hpp"

namespace clplu {

std::vector<std::string> default_label_names(std::size_t num_labels) {
  std::vector<std::string> names;
  names.reserve(num_labels);
  for (std::size_t j = 0; j < num_labels; ++j) names.push_back("label_" + std::to_string(j));
  return names;
}

MultiLabelDataset::MultiLabelDataset(RealMatrix features, BinaryMatrix labels,
                                     std::vector<std::string> label_names)
    : labels_(std::move(labels)), label_names_(std::move(label_names)) {
  if (features.rows() != labels_.rows()) {
    throw DataError("feature rows (" + std::to_string(features.rows()) + ") != label rows (" +
                    std::to_string(labels_.rows()) + ")");
  }
  if (labels_.rows() < 1) throw DataError("dataset needs at least one instance");
  if (features.cols() < 1) throw DataError("dataset needs at least one feature");
  if (labels_.cols() < 2) throw DataError("dataset needs at least two labels");
  for (const auto v : labels_.values()) {
    if (v > 1) throw DataError("label entries must be 0 or 1");
  }
  for (const auto v : features.values()) {
    if (!std::isfinite(v)) throw DataError("feature values must be finite");
  }
  if (label_names_.empty()) {
    label_names_ = default_label_names(labels_.cols());
  } else if (label_names_.size() != labels_.cols()) {
    throw DataError("expected " + std::to_string(labels_.cols()) + " label names, got " +
                    std::to_string(label_names_.size()));
  }
  features_ = std::make_shared<const RealMatrix>(std::move(features));
}

MultiLabelDataset MultiLabelDataset::subset(std::span<const std::size_t> indices) const {
  const auto d = num_features();
  const auto L = num_labels();
  RealMatrix x(indices.size(), d);
  BinaryMatrix y(indices.size(), L);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = indices[r];
    if (src >= num_instances()) throw DataError("subset index out of range");
    std::ranges::copy(features_->row(src), x.row(r).begin());
    std::ranges::copy(labels_.row(src), y.row(r).begin());
  }
  return MultiLabelDataset(std::move(x), std::move(y), label_names_);
}

void SplitSpec::validate() const {
  for (const double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("split fractions must lie in (0,1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

namespace {

// floor(n * frac), tolerant of products like 0.1 * 30 landing just below an integer.
std::size_t floor_share(std::size_t n, double frac) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
}

}  // namespace

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  const auto n_val = floor_share(n, spec.val_frac);
  const auto n_test = floor_share(n, spec.test_frac);
  if (n_val == 0 || n_test == 0 || n_val + n_test >= n) {
    throw DataError("dataset of " + std::to_string(n) +
                    " instances is too small to give every split at least one instance");
  }
  const auto n_train = n - n_val - n_test;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(perm));

  SplitIndices out;
  const auto first = perm.begin();
  out.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(first + static_cast<std::ptrdiff_t>(n_train),
                 first + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  std::ranges::sort(out.train);
  std::ranges::sort(out.val);
  std::ranges::sort(out.test);
  return out;
}

DatasetSplit split_dataset(const MultiLabelDataset& ds, const SplitSpec& spec) {
  const auto idx = split_indices(ds.num_instances(), spec);
  return {ds.subset(idx.train), ds.subset(idx.val), ds.subset(idx.test)};
}

double label_cardinality(const MultiLabelDataset& ds) {
  std::size_t positives = 0;
  for (const auto v : ds.labels().values()) positives += v;
  return static_cast<double>(positives) / static_cast<double>(ds.num_instances());
}

MinMaxScaling fit_minmax(const RealMatrix& features) {
  MinMaxScaling s;
  s.min.assign(features.cols(), 0.0);
  s.max.assign(features.cols(), 0.0);
  if (features.rows() == 0) return s;
  std::ranges::copy(features.row(0), s.min.begin());
  std::ranges::copy(features.row(0), s.max.begin());
  for (std::size_t i = 1; i < features.rows(); ++i) {
    const auto row = features.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      s.min[k] = std::min(s.min[k], row[k]);
      s.max[k] = std::max(s.max[k], row[k]);
    }
  }
  return s;
}

RealMatrix apply_minmax(const RealMatrix& features, const MinMaxScaling& scaling) {
  if (scaling.min.size() != features.cols() || scaling.max.size() != features.cols()) {
    throw DataError("scaling dimension does not match feature dimension");
  }
  RealMatrix out(features.rows(), features.cols());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t k = 0; k < features.cols(); ++k) {
      const double range = scaling.max[k] - scaling.min[k];
      out(i, k) = range > 0.0 ? (features(i, k) - scaling.min[k]) / range : 0.0;
    }
  }
  return out;
}

}  // namespace clplu
