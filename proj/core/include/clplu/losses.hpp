#pragma once

// Training losses over sigmoid outputs.
//
// Every loss takes probabilities, clamps them to [eps, 1 - eps] with
// eps = 1e-12 before taking logs, and returns the batch mean (sum over labels
// within an instance, mean over instances) together with the gradient with
// respect to the logits. Gradients use the unclamped probabilities, so a
// label with target t contributes (p - t) / n_b.
//
// Unit-member losses take an n_b x 2m probability matrix whose columns
// (2u, 2u + 1) hold (p_s, p_p) for unit u, and the n_b x m unit bits.
//
// Per unit, with PLU = 0 all three unit losses use -(log(1-p_s) + log(1-p_p)).
// With PLU = 1:
//   AN    -(log(1-p_s) + log(1-p_p))      both members assumed negative
//   AP    -(log p_s + log p_p)            both members assumed positive
//   PLUL  min over the label assignments consistent with the unit bit:
//           a) s=1, p=0   -(log p_s + log(1-p_p))
//           b) s=0, p=1   -(log(1-p_s) + log p_p)
//           c) s=1, p=1   -(log p_s + log p_p)
//         The gradient flows through the selected assignment only. Exact
//         ties are resolved by a preference order, c > a > b by default.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/matrix.hpp"

namespace clplu {

enum class LossMode { FullBce, An, Ap, Plul };

LossMode parse_loss_mode(std::string_view name);
std::string_view to_string(LossMode mode);

enum class Scenario : std::uint8_t { A, B, C };

char to_char(Scenario s);

/// Earlier entries win exact ties.
using TieOrder = std::array<Scenario, 3>;
inline constexpr TieOrder kDefaultTieOrder{Scenario::C, Scenario::A, Scenario::B};

inline constexpr double kProbEpsilon = 1e-12;

struct ScenarioCounts {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;

  std::size_t total() const noexcept { return a + b + c; }
  void add(Scenario s) noexcept;
  ScenarioCounts& operator+=(const ScenarioCounts& o) noexcept;
  bool operator==(const ScenarioCounts&) const = default;
};

struct UnitChoice {
  std::size_t instance;
  std::size_t unit;
  Scenario scenario;
};

struct LossResult {
  double value = 0.0;
  /// Same shape as the probability input.
  RealMatrix grad_logits;
  /// One entry per (instance, unit) with PLU = 1; PLUL only.
  std::vector<UnitChoice> chosen_scenario;

  ScenarioCounts scenario_counts() const;
};

/// Full BCE over every column.
LossResult bce_loss(const RealMatrix& probs, const BinaryMatrix& labels);
/// BCE over the observed columns; c = 0 gives value 0.
LossResult fu_loss(const RealMatrix& observed_probs, const BinaryMatrix& observed_labels);
LossResult an_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values);
LossResult ap_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values);
LossResult plul_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values,
                     const TieOrder& ties = kDefaultTieOrder);

/// Observed-label BCE plus the unit loss selected by `mode` (AN, AP or PLUL),
/// for the instances `rows` of `data`. `probs` is rows.size() x L in the
/// original label order; the gradient has the same layout. FullBce is
/// rejected: it needs labels that a concealed dataset does not carry.
LossResult clplu_risk(const RealMatrix& probs, const ConcealedDataset& data, std::span<const std::size_t> rows,
                      LossMode mode, const TieOrder& ties = kDefaultTieOrder);
/// All rows of `data`.
LossResult clplu_risk(const RealMatrix& probs, const ConcealedDataset& data, LossMode mode,
                      const TieOrder& ties = kDefaultTieOrder);

}  // namespace clplu
