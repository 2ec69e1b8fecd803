#pragma once

// Subcommand implementations behind the clplu executable.
//
// Output directory layout:
//   scheme.json
//   {train,val,test}.concealed    concealed splits (training-visible)
//   {train,val,test}.truth        sealed unit truth (evaluation only)
//   <loss>/<run>/checkpoint.json, log.jsonl, validation.json
//   <loss>/best.json, <loss>/best_checkpoint.json
//   sweep.csv, reproduce_<name>.csv
//
// Commands return a process exit code and throw clplu errors, which the
// executable maps to exit codes.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "clplu/harness/config.hpp"
#include "clplu/harness/studies.hpp"
#include "clplu/losses.hpp"
#include "clplu/synthetic.hpp"

namespace clplu::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

int cmd_conceal(const ExperimentConfig& cfg, std::ostream& out);

int cmd_train(const ExperimentConfig& cfg, LossMode mode, std::ostream& out);

struct EvaluateArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  /// Without truth the report covers observed labels only and omits plu_label_accuracy.
  std::optional<std::filesystem::path> truth;
  double threshold = 0.5;
  std::optional<std::filesystem::path> report_file;
};

/// Default evaluation of a trained config: best checkpoint of `mode` on the test split.
EvaluateArgs default_evaluate_args(const ExperimentConfig& cfg, LossMode mode);

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out);

int cmd_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> counts, std::ostream& out);

int cmd_reproduce(const ReproduceOptions& opts, const std::filesystem::path& output_dir, std::ostream& out);

struct ConvertArgs {
  std::filesystem::path input;
  std::string from;  ///< arff | libsvm | dense_csv | sparse_ml
  std::filesystem::path output;
  std::size_t num_labels = 0;
  std::size_t num_features = 0;
  bool labels_first = false;
  bool zero_based = false;
};

int cmd_convert(const ConvertArgs& args, std::ostream& out);

/// Writes a synthetic SparseMl dataset.
int cmd_generate(const SyntheticSpec& spec, const std::filesystem::path& output, std::ostream& out);

}  // namespace clplu::harness
