#include "clplu/harness/experiment.hpp"

#include <cstdio>

#include "clplu/error.hpp"

namespace clplu::harness {

namespace {

std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

MultiLabelDataset scaled(const MultiLabelDataset& ds, const SplitIndices& split) {
  const auto train = ds.subset(split.train);
  const auto scaling = fit_minmax(train.features());
  return MultiLabelDataset(apply_minmax(ds.features(), scaling), ds.labels(), ds.label_names());
}

}  // namespace

PluScheme make_scheme(const ExperimentConfig& cfg, std::size_t num_labels) {
  cfg.validate_for(num_labels);
  const auto privacy = cfg.privacy_indices.empty()
                           ? sample_privacy_indices(num_labels, cfg.privacy_count, cfg.privacy_seed)
                           : cfg.privacy_indices;
  return build_scheme(num_labels, privacy, cfg.pairing, cfg.pairing_seed);
}

PreparedExperiment prepare_experiment(const MultiLabelDataset& ds, const ExperimentConfig& cfg) {
  auto split = split_indices(ds.num_instances(), cfg.split);
  auto data = cfg.minmax ? scaled(ds, split) : ds;
  auto scheme = make_scheme(cfg, data.num_labels());
  const PluScheme none(data.num_labels(), {}, cfg.pairing, cfg.pairing_seed);
  auto train = data.subset(split.train);
  auto val = data.subset(split.val);
  auto test = data.subset(split.test);
  return PreparedExperiment{
      data,
      split,
      scheme,
      conceal(train, scheme),
      conceal(val, scheme),
      conceal(test, scheme),
      conceal(train, none),
      conceal(val, none),
  };
}

GridResult run_grid(const ConcealedDataset& train_set, const EvaluationSet& validation, const ExperimentConfig& cfg,
                    LossMode mode, const RunCallback& on_run) {
  GridResult result;
  result.mode = mode;
  std::vector<CandidateRun> candidates;
  for (const auto& tc : cfg.grid_configs(mode)) {
    auto trained = train(train_set, &validation, tc);
    GridRun run{tc, std::move(trained.model), std::move(trained.history), {}};
    run.validation = run.history.epochs.back().val_metrics.value();
    if (on_run) on_run(run);
    candidates.push_back({run.config, run.validation});
    result.runs.push_back(std::move(run));
  }
  result.best = model_select(candidates);
  return result;
}

GridResult run_grid(const PreparedExperiment& prep, const ExperimentConfig& cfg, LossMode mode,
                    const RunCallback& on_run) {
  if (mode == LossMode::FullBce) {
    return run_grid(prep.train_full.data, EvaluationSet{&prep.val_full.data, &prep.val_full.truth}, cfg, mode, on_run);
  }
  return run_grid(prep.train.data, EvaluationSet{&prep.val.data, &prep.val.truth}, cfg, mode, on_run);
}

std::string run_name(const TrainConfig& cfg) {
  return "bs" + std::to_string(cfg.batch_size) + "_lr" + compact(cfg.lr) + "_wd" + compact(cfg.weight_decay);
}

}  // namespace clplu::harness
