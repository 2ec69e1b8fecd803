#include "clplu/harness/reference.hpp"

#include <array>

namespace clplu::harness {

namespace {

constexpr PublishedMetrics pct(double ap, double hl, double oe, double cov, double rl) {
  return {ap / 100, hl / 100, oe / 100, cov / 100, rl / 100};
}

std::vector<double> fractions(std::initializer_list<double> percents) {
  std::vector<double> out;
  for (const auto p : percents) out.push_back(p / 100);
  return out;
}

const std::array<DatasetReference, 4>& table() {
  static const std::array<DatasetReference, 4> rows{{
      {"yeast", 2417, 103, 14, 4.2,
       pct(76.70, 20.66, 22.73, 48.44, 16.85),
       pct(73.44, 22.82, 25.31, 49.12, 19.24),
       pct(73.63, 21.31, 23.61, 49.78, 19.61),
       pct(77.79, 20.77, 21.49, 43.73, 14.90),
       {{2, 3, 4, 5}, fractions({68.40, 63.37, 50.39, 44.54}), fractions({76.70, 73.58, 63.67, 58.06})}},
      {"scene", 2407, 294, 6, 1.1,
       pct(85.29, 10.28, 24.75, 8.40, 8.36),
       pct(66.46, 17.37, 44.63, 29.55, 33.38),
       pct(84.06, 11.94, 26.08, 9.33, 9.37),
       pct(84.48, 11.00, 28.43, 8.37, 8.52),
       {}},
      {"image", 2000, 294, 5, 1.2,
       pct(65.00, 32.51, 52.78, 29.98, 29.17),
       pct(52.92, 53.50, 75.02, 44.00, 46.88),
       pct(53.29, 52.50, 70.29, 42.50, 47.08),
       pct(72.58, 22.30, 44.00, 20.10, 21.00),
       {}},
      {"cal500", 502, 68, 174, 26.0,
       pct(47.84, 15.29, 13.73, 75.88, 18.97),
       pct(46.97, 16.61, 13.87, 76.33, 19.13),
       pct(46.82, 16.66, 14.35, 76.58, 19.29),
       pct(47.66, 15.40, 13.73, 76.07, 18.19),
       {{2, 8, 15, 30}, fractions({47.27, 46.77, 43.82, 41.28}), fractions({48.44, 47.96, 45.66, 43.04})}},
  }};
  return rows;
}

}  // namespace

const PublishedMetrics& DatasetReference::for_mode(LossMode mode) const {
  switch (mode) {
    case LossMode::Plul: return plul;
    case LossMode::An: return an;
    case LossMode::Ap: return ap;
    case LossMode::FullBce: break;
  }
  return full_bce;
}

std::span<const DatasetReference> known_datasets() { return table(); }

const DatasetReference* find_dataset(std::string_view name) {
  for (const auto& row : table()) {
    if (row.name == name) return &row;
  }
  return nullptr;
}

}  // namespace clplu::harness
