#pragma once

// Experiment configuration.
//
// A small TOML subset: `key = value` lines, `[section]` headers that prefix
// the following keys with "section.", `#` comments, quoted or bare strings,
// booleans, numbers and flat arrays `[a, b, c]`. Unknown keys are errors.
//
//   dataset = "yeast.sparse"        # relative to the config file
//   format = "sparse_ml"
//   output_dir = "runs/yeast"
//   seed = 1                        # default for every seed below
//
//   [split]      train, val, test, seed
//   [privacy]    indices = [..]  or  count, seed
//   [pairing]    mode = "dataset_fixed" | "per_instance", seed
//   [train]      epochs, batch_sizes, lrs, weight_decays, lr_decay_epochs,
//                lr_decay_factor, seed, threshold, bias, minmax, tie_order

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/dataset.hpp"
#include "clplu/trainer.hpp"

namespace clplu::harness {

struct TrainGrid {
  std::vector<std::size_t> batch_sizes{8, 16, 32, 64, 256};
  std::vector<double> lrs{0.1, 0.01, 0.001};
  std::vector<double> weight_decays{1e-3, 1e-4};

  std::size_t size() const noexcept { return batch_sizes.size() * lrs.size() * weight_decays.size(); }
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  DataFormat format = DataFormat::SparseMl;
  std::filesystem::path output_dir = "clplu_out";

  SplitSpec split;
  /// Explicit privacy labels; when empty, `privacy_count` labels are sampled with `privacy_seed`.
  std::vector<std::size_t> privacy_indices;
  std::size_t privacy_count = 2;
  std::uint64_t privacy_seed = 0;
  PairingMode pairing = PairingMode::DatasetFixed;
  std::uint64_t pairing_seed = 0;

  /// Template for every grid cell; batch_size, lr and weight_decay are overwritten.
  TrainConfig train;
  TrainGrid grid;
  bool minmax = false;

  /// Number of units per instance.
  std::size_t num_units() const noexcept { return privacy_indices.empty() ? privacy_count : privacy_indices.size(); }

  /// Grid cells in (batch_size, lr, weight_decay) nesting order, loss mode and seed filled in.
  std::vector<TrainConfig> grid_configs(LossMode mode) const;

  /// Checks everything that does not need the dataset. Throws ConfigError.
  void validate() const;
  /// Checks the unit count against the label count: m >= 1 and 2m <= L.
  void validate_for(std::size_t num_labels) const;

  /// Sets every seed (split, privacy, pairing, training).
  void set_seed(std::uint64_t seed);
};

/// Relative dataset and output paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {},
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses "2,3,4,5".
std::vector<std::size_t> parse_count_list(std::string_view text);

}  // namespace clplu::harness
