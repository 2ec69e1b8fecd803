#include "clplu/harness/studies.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "clplu/error.hpp"
#include "clplu/harness/experiment.hpp"

namespace clplu::harness {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

const SweepCell& SweepTable::cell(LossMode mode, std::size_t num_units) const {
  for (const auto& c : cells) {
    if (c.mode == mode && c.num_units == num_units) return c;
  }
  throw ConfigError("sweep table has no cell for " + std::string(to_string(mode)) + ", m=" + std::to_string(num_units));
}

std::string SweepTable::to_csv() const {
  std::ostringstream out;
  out << "loss";
  for (const auto m : unit_counts) out << ",m=" << m;
  out << '\n';
  for (const auto mode : modes) {
    out << to_string(mode);
    for (const auto m : unit_counts) {
      const auto& c = cell(mode, m);
      out << ',' << (c.average_precision ? fixed4(*c.average_precision) : std::string("FAILED"));
    }
    out << '\n';
  }
  return out.str();
}

SweepTable run_sweep(const MultiLabelDataset& ds, const ExperimentConfig& cfg, std::span<const std::size_t> counts,
                     std::span<const LossMode> modes, std::ostream* progress) {
  SweepTable table;
  table.unit_counts.assign(counts.begin(), counts.end());
  table.modes.assign(modes.begin(), modes.end());
  table.cells.reserve(modes.size() * counts.size());
  for (const auto mode : modes) {
    for (const auto m : counts) table.cells.push_back({mode, m, std::nullopt, {}});
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    auto cell_cfg = cfg;
    cell_cfg.privacy_indices.clear();
    cell_cfg.privacy_count = counts[k];
    std::optional<PreparedExperiment> prep;
    std::string prep_error;
    try {
      prep.emplace(prepare_experiment(ds, cell_cfg));
    } catch (const std::exception& e) {
      prep_error = e.what();
    }
    for (std::size_t r = 0; r < modes.size(); ++r) {
      auto& cell = table.cells[r * counts.size() + k];
      if (!prep) {
        cell.error = prep_error;
      } else {
        try {
          const auto grid = run_grid(*prep, cell_cfg, modes[r]);
          cell.average_precision = evaluate(grid.winner().model, prep->test_set(), cell_cfg.train.threshold).average_precision;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      if (progress) {
        *progress << "sweep m=" << counts[k] << ' ' << to_string(modes[r]) << ": "
                  << (cell.average_precision ? fixed4(*cell.average_precision) : "FAILED (" + cell.error + ")") << '\n';
      }
    }
  }
  return table;
}

std::filesystem::path dataset_file(const std::filesystem::path& data_dir, std::string_view name) {
  return data_dir / (std::string(name) + ".sparse");
}

ExperimentConfig reproduction_config(const std::filesystem::path& data_dir, std::string_view name,
                                     std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.dataset = dataset_file(data_dir, name);
  cfg.format = DataFormat::SparseMl;
  cfg.set_seed(seed);
  cfg.privacy_count = 2;
  cfg.pairing = PairingMode::DatasetFixed;
  return cfg;
}

const ModeOutcome* SettingOutcome::find(LossMode mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return &m;
  }
  return nullptr;
}

bool ReproduceReport::all_passed() const {
  for (const auto& c : comparisons) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ReproduceReport::to_csv() const {
  std::ostringstream out;
  out << "units,loss,metric,measured,published,tolerance,status\n";
  for (const auto& c : comparisons) {
    out << c.num_units << ',' << to_string(c.mode) << ',' << c.metric << ',' << fixed4(c.measured) << ','
        << fixed4(c.published) << ',' << fixed4(c.tolerance) << ',' << (c.passed ? "pass" : "FAIL") << '\n';
  }
  return out.str();
}

ReproduceReport reproduce(const ReproduceOptions& opts, std::ostream* progress) {
  ReproduceReport report;
  report.reference = find_dataset(opts.name);
  if (!report.reference) {
    std::string known;
    for (const auto& d : known_datasets()) known += (known.empty() ? "" : ", ") + std::string(d.name);
    throw ConfigError("unknown dataset '" + opts.name + "'; known datasets: " + known);
  }
  auto cfg = reproduction_config(opts.data_dir, opts.name, opts.seed);
  if (opts.grid) cfg.grid = *opts.grid;
  if (opts.epochs) cfg.train.epochs = *opts.epochs;
  if (!std::filesystem::exists(cfg.dataset)) {
    throw DataError("dataset file " + cfg.dataset.string() + " not found; convert the public " + opts.name +
                    " release with `clplu convert` into that path");
  }
  const auto ds = load_dataset(cfg.dataset, cfg.format);

  // The fully supervised reference does not depend on the unit count.
  std::optional<GridResult> full;
  for (const auto m : opts.unit_counts) {
    auto setting_cfg = cfg;
    setting_cfg.privacy_count = m;
    const auto prep = prepare_experiment(ds, setting_cfg);
    SettingOutcome setting;
    setting.num_units = m;
    for (const auto mode : opts.modes) {
      const GridResult* grid = nullptr;
      GridResult local;
      if (mode == LossMode::FullBce) {
        if (!full) full = run_grid(prep, setting_cfg, mode);
        grid = &*full;
      } else {
        local = run_grid(prep, setting_cfg, mode);
        grid = &local;
      }
      const auto& win = grid->winner();
      ModeOutcome outcome{mode, run_name(win.config), win.validation,
                          evaluate(win.model, prep.test_set(), setting_cfg.train.threshold)};
      if (progress) {
        *progress << opts.name << " m=" << m << ' ' << to_string(mode) << ": winner " << outcome.winner
                  << ", test AP " << fixed4(outcome.test.average_precision) << '\n';
      }
      const auto& pub = report.reference->for_mode(mode);
      const std::pair<const char*, std::pair<double, double>> rows[] = {
          {"average_precision", {outcome.test.average_precision, pub.average_precision}},
          {"hamming_loss", {outcome.test.hamming_loss, pub.hamming_loss}},
          {"one_error", {outcome.test.one_error, pub.one_error}},
          {"coverage", {outcome.test.coverage, pub.coverage}},
          {"ranking_loss", {outcome.test.ranking_loss, pub.ranking_loss}},
      };
      for (const auto& [metric, values] : rows) {
        const auto [measured, published] = values;
        report.comparisons.push_back({m, mode, metric, measured, published, kReproduceTolerance,
                                      std::abs(measured - published) <= kReproduceTolerance});
      }
      setting.modes.push_back(std::move(outcome));
    }
    report.settings.push_back(std::move(setting));
  }
  return report;
}

}  // namespace clplu::harness
