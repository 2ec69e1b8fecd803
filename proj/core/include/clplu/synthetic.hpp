#pragma once

#include <cstddef>
#include <cstdint>

#include "clplu/dataset.hpp"

namespace clplu {

/// Linear-threshold generator for multi-label data with a target label cardinality.
///
/// x ~ N(0, I_d); label j is positive when w_j . x + noise * e > t_j, with
/// w_j ~ N(0, I_d / d) and e ~ N(0,1). Per-label base rates are spread
/// around cardinality / L and each t_j is set to the matching empirical
/// quantile, so the realised cardinality is close to the request.
struct SyntheticSpec {
  std::size_t n = 500;
  std::size_t d = 20;
  std::size_t L = 6;
  double cardinality = 1.5;
  double noise = 0.3;
  std::uint64_t seed = 0;
};

MultiLabelDataset make_synthetic(const SyntheticSpec& spec);

}  // namespace clplu
