#include "clplu/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "clplu/error.hpp"
#include "clplu/rng.hpp"

namespace clplu {

MultiLabelDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.L < 2) throw ConfigError("synthetic data needs n >= 1, d >= 1, L >= 2");
  if (!(spec.cardinality > 0.0 && spec.cardinality < static_cast<double>(spec.L))) {
    throw ConfigError("synthetic cardinality must lie in (0, L)");
  }
  Rng rng(spec.seed);
  const auto n = spec.n, d = spec.d, L = spec.L;

  RealMatrix x(n, d);
  for (auto& v : x.values()) v = rng.normal();

  RealMatrix w(L, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& v : w.values()) v = rng.normal() * scale;

  // Base rates around cardinality / L, varied by up to +-50%, renormalised.
  std::vector<double> rate(L);
  double total = 0.0;
  for (auto& r : rate) {
    r = 0.5 + rng.uniform01();
    total += r;
  }
  for (auto& r : rate) r = std::clamp(r / total * spec.cardinality, 0.5 / static_cast<double>(n), 0.95);

  RealMatrix score(n, L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += w(j, k) * x(i, k);
      score(i, j) = s + spec.noise * rng.normal();
    }
  }

  BinaryMatrix y(n, L);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = score(i, j);
    auto positives = static_cast<std::size_t>(std::llround(rate[j] * static_cast<double>(n)));
    positives = std::clamp<std::size_t>(positives, 1, n);
    // Threshold at the positives-th largest score.
    auto nth = column.begin() + static_cast<std::ptrdiff_t>(n - positives);
    std::nth_element(column.begin(), nth, column.end());
    const double threshold = *nth;
    for (std::size_t i = 0; i < n; ++i) y(i, j) = score(i, j) >= threshold ? 1 : 0;
  }
  return MultiLabelDataset(std::move(x), std::move(y));
}

}  // namespace clplu
