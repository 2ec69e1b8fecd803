#include "clplu/harness/commands.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "clplu/convert.hpp"
#include "clplu/error.hpp"
#include "clplu/harness/experiment.hpp"
#include "clplu/model.hpp"
#include "clplu/trainer.hpp"

namespace clplu::harness {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed for " + path.string());
}

fs::path split_file(const ExperimentConfig& cfg, const char* split, const char* ext) {
  return cfg.output_dir / (std::string(split) + ext);
}

void require_file(const fs::path& p, const char* hint) {
  if (!fs::exists(p)) throw DataError(p.string() + " not found; " + hint);
}

void print_audit(std::ostream& out, const char* split, const ConcealedDataset& cd) {
  const auto audit = audit_no_leak(cd);
  out << "audit " << split << ": " << (audit.passed ? "pass" : "FAIL");
  for (const auto& v : audit.violations) out << "\n  " << v;
  out << '\n';
  if (!audit.passed) throw DataError(std::string("concealed ") + split + " split leaks unit labels");
}

nlohmann::ordered_json parse_json(const std::string& text) { return nlohmann::ordered_json::parse(text); }

}  // namespace

int cmd_conceal(const ExperimentConfig& cfg, std::ostream& out) {
  const auto ds = load_dataset(cfg.dataset, cfg.format);
  cfg.validate_for(ds.num_labels());
  const auto prep = prepare_experiment(ds, cfg);
  fs::create_directories(cfg.output_dir);

  write_text(cfg.output_dir / "scheme.json", scheme_to_json(prep.scheme) + "\n");
  const std::pair<const char*, const ConcealResult*> splits[] = {
      {"train", &prep.train}, {"val", &prep.val}, {"test", &prep.test}};
  for (const auto& [name, result] : splits) {
    save_concealed(result->data, split_file(cfg, name, ".concealed"));
    save_truth(result->truth, split_file(cfg, name, ".truth"));
  }
  out << "dataset: n=" << ds.num_instances() << " d=" << ds.num_features() << " L=" << ds.num_labels() << '\n'
      << "split: train=" << prep.split.train.size() << " val=" << prep.split.val.size()
      << " test=" << prep.split.test.size() << '\n'
      << "units: m=" << prep.scheme.num_units() << " observed c=" << prep.scheme.num_observed() << '\n';
  for (const auto& u : prep.scheme.units()) out << "  unit s=" << u.partner << " p=" << u.privacy << '\n';
  for (const auto& [name, result] : splits) print_audit(out, name, result->data);
  out << "wrote " << cfg.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_train(const ExperimentConfig& cfg, LossMode mode, std::ostream& out) {
  const auto mode_dir = cfg.output_dir / std::string(to_string(mode));
  fs::create_directories(mode_dir);

  auto on_run = [&](const GridRun& run) {
    const auto dir = mode_dir / run_name(run.config);
    fs::create_directories(dir);
    save_checkpoint(run.model, {run.config.seed, std::string(to_string(mode)), run.config.epochs},
                    dir / "checkpoint.json");
    std::string log;
    for (const auto& rec : run.history.epochs) log += epoch_record_to_json(rec) + "\n";
    write_text(dir / "log.jsonl", log);
    write_text(dir / "validation.json", report_to_json(run.validation) + "\n");
    out << to_string(mode) << ' ' << run_name(run.config) << ": val AP "
        << run.validation.average_precision << ", final train loss " << run.history.epochs.back().train_loss << '\n';
  };

  GridResult grid;
  if (mode == LossMode::FullBce) {
    const auto ds = load_dataset(cfg.dataset, cfg.format);
    grid = run_grid(prepare_experiment(ds, cfg), cfg, mode, on_run);
  } else {
    const char* hint = "run `clplu conceal` with this config first";
    for (const auto* f : {"train.concealed", "val.concealed", "val.truth"}) require_file(cfg.output_dir / f, hint);
    const auto train_set = load_concealed(cfg.output_dir / "train.concealed");
    const auto val_set = load_concealed(cfg.output_dir / "val.concealed");
    const auto val_truth = load_truth(cfg.output_dir / "val.truth");
    grid = run_grid(train_set, EvaluationSet{&val_set, &val_truth}, cfg, mode, on_run);
  }

  const auto& win = grid.winner();
  save_checkpoint(win.model, {win.config.seed, std::string(to_string(mode)), win.config.epochs},
                  mode_dir / "best_checkpoint.json");
  nlohmann::ordered_json best;
  best["run"] = run_name(win.config);
  best["loss"] = to_string(mode);
  best["batch_size"] = win.config.batch_size;
  best["lr"] = win.config.lr;
  best["weight_decay"] = win.config.weight_decay;
  best["epochs"] = win.config.epochs;
  best["seed"] = win.config.seed;
  best["validation"] = parse_json(report_to_json(win.validation, -1));
  write_text(mode_dir / "best.json", best.dump(2) + "\n");
  out << "winner " << run_name(win.config) << " (val AP " << win.validation.average_precision << ")\n";
  return kExitOk;
}

EvaluateArgs default_evaluate_args(const ExperimentConfig& cfg, LossMode mode) {
  EvaluateArgs args;
  args.checkpoint = cfg.output_dir / std::string(to_string(mode)) / "best_checkpoint.json";
  args.data = cfg.output_dir / "test.concealed";
  const auto truth = cfg.output_dir / "test.truth";
  if (fs::exists(truth)) args.truth = truth;
  args.threshold = cfg.train.threshold;
  return args;
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  require_file(args.checkpoint, "train a model first");
  require_file(args.data, "run `clplu conceal` first");
  const auto ckpt = load_checkpoint(args.checkpoint);
  const auto data = load_concealed(args.data);
  std::optional<SealedTruth> truth;
  if (args.truth) truth = load_truth(*args.truth);
  const auto report = evaluate(ckpt.model, EvaluationSet{&data, truth ? &*truth : nullptr}, args.threshold);
  const auto json = report_to_json(report) + "\n";
  out << json;
  if (args.report_file) {
    if (args.report_file->has_parent_path()) fs::create_directories(args.report_file->parent_path());
    write_text(*args.report_file, json);
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, std::span<const std::size_t> counts, std::ostream& out) {
  if (counts.empty()) throw ConfigError("--plu-counts must list at least one unit count");
  const auto ds = load_dataset(cfg.dataset, cfg.format);
  const LossMode modes[] = {LossMode::An, LossMode::Plul};
  const auto table = run_sweep(ds, cfg, counts, modes, &out);
  fs::create_directories(cfg.output_dir);
  const auto csv = table.to_csv();
  write_text(cfg.output_dir / "sweep.csv", csv);
  out << csv;
  return kExitOk;
}

int cmd_reproduce(const ReproduceOptions& opts, const fs::path& output_dir, std::ostream& out) {
  const auto report = reproduce(opts, &out);
  const auto csv = report.to_csv();
  out << csv;
  for (const auto& s : report.settings) {
    const auto* plul = s.find(LossMode::Plul);
    const auto* an = s.find(LossMode::An);
    if (plul && an) {
      out << "m=" << s.num_units << ": PLUL AP " << plul->test.average_precision
          << (plul->test.average_precision > an->test.average_precision ? " > " : " <= ") << "AN AP "
          << an->test.average_precision << '\n';
    }
  }
  out << (report.all_passed() ? "all comparisons within tolerance\n" : "some comparisons outside tolerance\n");
  fs::create_directories(output_dir);
  write_text(output_dir / ("reproduce_" + opts.name + ".csv"), csv);
  return kExitOk;
}

int cmd_convert(const ConvertArgs& args, std::ostream& out) {
  std::ifstream in(args.input);
  if (!in) throw DataError("cannot open " + args.input.string());
  const auto source = args.input.string();
  auto ds = [&]() -> MultiLabelDataset {
    if (args.from == "arff") {
      if (args.num_labels == 0) throw ConfigError("--labels is required for arff input");
      return read_arff(in, ArffOptions{args.num_labels, args.labels_first}, source);
    }
    if (args.from == "libsvm") {
      return read_libsvm_multilabel(in, LibsvmOptions{args.num_labels, args.num_features, !args.zero_based}, source);
    }
    return read_dataset(in, parse_data_format(args.from), source);
  }();
  save_dataset(ds, args.output, DataFormat::SparseMl);
  out << "wrote " << args.output.string() << ": n=" << ds.num_instances() << " d=" << ds.num_features()
      << " L=" << ds.num_labels() << " cardinality=" << label_cardinality(ds) << '\n';
  return kExitOk;
}

int cmd_generate(const SyntheticSpec& spec, const fs::path& output, std::ostream& out) {
  const auto ds = make_synthetic(spec);
  save_dataset(ds, output, DataFormat::SparseMl);
  out << "wrote " << output.string() << ": n=" << ds.num_instances() << " d=" << ds.num_features()
      << " L=" << ds.num_labels() << " cardinality=" << label_cardinality(ds) << '\n';
  return kExitOk;
}

}  // namespace clplu::harness
