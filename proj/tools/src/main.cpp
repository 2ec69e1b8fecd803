#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "clplu/error.hpp"
#include "clplu/harness/commands.hpp"
#include "clplu/harness/config.hpp"
#include "clplu/harness/reference.hpp"

namespace h = clplu::harness;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "experiment config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "override every seed in the config");
  cmd->add_option("--out", flags.out, "output directory (overrides output_dir)");
}

h::ExperimentConfig load(const CommonFlags& flags) {
  auto cfg = h::load_config(flags.config);
  if (flags.seed) cfg.set_seed(*flags.seed);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  return cfg;
}

std::string known_names() {
  std::string s;
  for (const auto& d : h::known_datasets()) s += (s.empty() ? "" : ", ") + std::string(d.name);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clplu: multi-label learning with concealed privacy labels"};
  app.require_subcommand(1);

  CommonFlags conceal_flags;
  auto* conceal = app.add_subcommand("conceal", "split a dataset and write concealed splits, scheme and sealed truth");
  add_common(conceal, conceal_flags);

  CommonFlags train_flags;
  std::string train_loss;
  auto* train = app.add_subcommand("train", "grid-search a loss mode and keep every checkpoint plus the winner");
  add_common(train, train_flags);
  train->add_option("--loss", train_loss, "full_bce, an, ap or plul")->required();

  std::string eval_config, eval_loss, eval_out;
  h::EvaluateArgs eval_args;
  std::string eval_truth;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a concealed split");
  evaluate->add_option("--config", eval_config, "config whose best checkpoint and test split are evaluated");
  evaluate->add_option("--loss", eval_loss, "loss mode whose best checkpoint is evaluated (with --config)");
  evaluate->add_option("--checkpoint", eval_args.checkpoint, "checkpoint JSON");
  evaluate->add_option("--data", eval_args.data, "concealed split");
  evaluate->add_option("--truth", eval_truth, "sealed truth of the split");
  evaluate->add_option("--threshold", eval_args.threshold, "decision threshold")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--out", eval_out, "directory to write metrics.json into");

  CommonFlags sweep_flags;
  std::string counts_text;
  auto* sweep = app.add_subcommand("sweep", "average precision of AN and PLUL across unit counts");
  add_common(sweep, sweep_flags);
  sweep->add_option("--plu-counts", counts_text, "comma-separated unit counts, e.g. 2,3,4,5")->required();

  h::ReproduceOptions repro;
  std::string repro_out = "clplu_reproduce", repro_counts, repro_losses;
  std::optional<std::size_t> repro_epochs;
  auto* reproduce = app.add_subcommand("reproduce", "run the benchmark protocol on a known dataset");
  reproduce->add_option("dataset", repro.name, "dataset name (" + known_names() + ")")->required();
  reproduce->add_option("--data-dir", repro.data_dir, "directory holding <dataset>.sparse");
  reproduce->add_option("--seed", repro.seed, "seed for split, privacy labels, pairing and training");
  reproduce->add_option("--out", repro_out, "output directory");
  reproduce->add_option("--plu-counts", repro_counts, "unit counts to run (default 1,2)");
  reproduce->add_option("--loss", repro_losses, "comma-separated loss modes (default all)");
  reproduce->add_option("--epochs", repro_epochs, "override the epoch count (smoke runs)");

  h::ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "convert a public multi-label file to the sparse format");
  convert->add_option("--from", conv.from, "arff, libsvm, dense_csv or sparse_ml")->required();
  convert->add_option("--input", conv.input, "input file")->required()->check(CLI::ExistingFile);
  convert->add_option("--output", conv.output, "output .sparse file")->required();
  convert->add_option("--labels", conv.num_labels, "number of label attributes (arff) or labels (libsvm)");
  convert->add_option("--features", conv.num_features, "feature dimension (libsvm; inferred when 0)");
  convert->add_flag("--labels-first", conv.labels_first, "arff label attributes precede the features");
  convert->add_flag("--zero-based", conv.zero_based, "libsvm feature indices start at 0");

  clplu::SyntheticSpec synth;
  std::string synth_out;
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--out", synth_out, "output .sparse file")->required();
  generate->add_option("--n", synth.n, "instances");
  generate->add_option("--d", synth.d, "features");
  generate->add_option("--labels", synth.L, "labels");
  generate->add_option("--cardinality", synth.cardinality, "mean positives per instance");
  generate->add_option("--noise", synth.noise, "score noise");
  generate->add_option("--seed", synth.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? h::kExitOk : h::kExitUsage;
  }

  try {
    if (*conceal) return h::cmd_conceal(load(conceal_flags), std::cout);
    if (*train) return h::cmd_train(load(train_flags), clplu::parse_loss_mode(train_loss), std::cout);
    if (*evaluate) {
      h::EvaluateArgs args = eval_args;
      if (!eval_config.empty()) {
        if (eval_loss.empty()) throw clplu::ConfigError("--config needs --loss to pick a checkpoint");
        args = h::default_evaluate_args(h::load_config(eval_config), clplu::parse_loss_mode(eval_loss));
        if (evaluate->count("--threshold")) args.threshold = eval_args.threshold;
      } else if (args.checkpoint.empty() || args.data.empty()) {
        throw clplu::ConfigError("evaluate needs --config and --loss, or --checkpoint and --data");
      }
      if (!eval_truth.empty()) args.truth = eval_truth;
      if (!eval_out.empty()) args.report_file = std::filesystem::path(eval_out) / "metrics.json";
      return h::cmd_evaluate(args, std::cout);
    }
    if (*sweep) return h::cmd_sweep(load(sweep_flags), h::parse_count_list(counts_text), std::cout);
    if (*reproduce) {
      if (!repro_counts.empty()) repro.unit_counts = h::parse_count_list(repro_counts);
      if (!repro_losses.empty()) {
        repro.modes.clear();
        std::size_t start = 0;
        while (start <= repro_losses.size()) {
          auto end = repro_losses.find(',', start);
          if (end == std::string::npos) end = repro_losses.size();
          repro.modes.push_back(clplu::parse_loss_mode(repro_losses.substr(start, end - start)));
          start = end + 1;
        }
      }
      repro.epochs = repro_epochs;
      return h::cmd_reproduce(repro, repro_out, std::cout);
    }
    if (*convert) return h::cmd_convert(conv, std::cout);
    if (*generate) return h::cmd_generate(synth, synth_out, std::cout);
  } catch (const clplu::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return h::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kExitUsage;
  }
  return h::kExitUsage;
}
