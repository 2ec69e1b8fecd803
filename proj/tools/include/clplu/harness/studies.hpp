#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clplu/dataset.hpp"
#include "clplu/harness/config.hpp"
#include "clplu/harness/reference.hpp"
#include "clplu/losses.hpp"
#include "clplu/metrics.hpp"

namespace clplu::harness {

// --- unit-count sweep ------------------------------------------------------

struct SweepCell {
  LossMode mode = LossMode::Plul;
  std::size_t num_units = 0;
  /// Test average precision of the grid winner; empty when the cell failed.
  std::optional<double> average_precision;
  std::string error;
};

struct SweepTable {
  std::vector<std::size_t> unit_counts;
  std::vector<LossMode> modes;
  /// Row-major: modes x unit_counts.
  std::vector<SweepCell> cells;

  const SweepCell& cell(LossMode mode, std::size_t num_units) const;
  /// Header "loss,m=<m>,...", one row per mode, FAILED for failed cells.
  std::string to_csv() const;
};

/// Per unit count: fresh scheme, full grid per mode, test AP of the winner.
/// Failures are recorded per cell and the sweep continues.
SweepTable run_sweep(const MultiLabelDataset& ds, const ExperimentConfig& cfg, std::span<const std::size_t> counts,
                     std::span<const LossMode> modes, std::ostream* progress = nullptr);

// --- benchmark reproduction ------------------------------------------------

/// <data_dir>/<name>.sparse
std::filesystem::path dataset_file(const std::filesystem::path& data_dir, std::string_view name);

/// 80/10/10 split, full grid, 120 epochs, sampled privacy labels, dataset-fixed pairing.
ExperimentConfig reproduction_config(const std::filesystem::path& data_dir, std::string_view name, std::uint64_t seed);

struct ReproduceOptions {
  std::string name;
  std::filesystem::path data_dir = "data";
  std::uint64_t seed = 1;
  std::vector<std::size_t> unit_counts{1, 2};
  std::vector<LossMode> modes{LossMode::Plul, LossMode::An, LossMode::Ap, LossMode::FullBce};
  /// Optional overrides of the standard protocol (for smoke runs).
  std::optional<TrainGrid> grid;
  std::optional<std::size_t> epochs;
};

struct ModeOutcome {
  LossMode mode = LossMode::Plul;
  std::string winner;
  MetricsReport validation;
  MetricsReport test;
};

struct SettingOutcome {
  std::size_t num_units = 0;
  std::vector<ModeOutcome> modes;

  /// nullptr when the mode was not run.
  const ModeOutcome* find(LossMode mode) const;
};

struct Comparison {
  std::size_t num_units = 0;
  LossMode mode = LossMode::Plul;
  std::string metric;
  double measured = 0.0;
  double published = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ReproduceReport {
  const DatasetReference* reference = nullptr;
  std::vector<SettingOutcome> settings;
  std::vector<Comparison> comparisons;

  bool all_passed() const;
  std::string to_csv() const;
};

/// Absolute tolerance on every metric, in fraction units.
inline constexpr double kReproduceTolerance = 0.05;

/// Throws ConfigError for unknown names and DataError when the file is missing.
ReproduceReport reproduce(const ReproduceOptions& opts, std::ostream* progress = nullptr);

}  // namespace clplu::harness
