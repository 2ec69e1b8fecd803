#include "clplu/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clplu/error.hpp"

namespace clplu {

LossMode parse_loss_mode(std::string_view name) {
  if (name == "full_bce" || name == "FULL_BCE" || name == "bce") return LossMode::FullBce;
  if (name == "an" || name == "AN") return LossMode::An;
  if (name == "ap" || name == "AP") return LossMode::Ap;
  if (name == "plul" || name == "PLUL") return LossMode::Plul;
  throw ConfigError("unknown loss mode '" + std::string(name) + "' (expected full_bce, an, ap or plul)");
}

std::string_view to_string(LossMode mode) {
  switch (mode) {
    case LossMode::FullBce:
      return "full_bce";
    case LossMode::An:
      return "an";
    case LossMode::Ap:
      return "ap";
    case LossMode::Plul:
      return "plul";
  }
  return "?";
}

char to_char(Scenario s) {
  switch (s) {
    case Scenario::A:
      return 'a';
    case Scenario::B:
      return 'b';
    case Scenario::C:
      return 'c';
  }
  return '?';
}

void ScenarioCounts::add(Scenario s) noexcept {
  switch (s) {
    case Scenario::A:
      ++a;
      break;
    case Scenario::B:
      ++b;
      break;
    case Scenario::C:
      ++c;
      break;
  }
}

ScenarioCounts& ScenarioCounts::operator+=(const ScenarioCounts& o) noexcept {
  a += o.a;
  b += o.b;
  c += o.c;
  return *this;
}

ScenarioCounts LossResult::scenario_counts() const {
  ScenarioCounts counts;
  for (const auto& choice : chosen_scenario) counts.add(choice.scenario);
  return counts;
}

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

// -log of the clamped probability that the label takes `target`.
double nll(double p, bool target) {
  const double q = clamp_prob(p);
  return target ? -std::log(q) : -std::log(1.0 - q);
}

// -(log P(s = ts) + log P(p = tp)); every unit term goes through here so that
// equal label hypotheses give bit-identical values across the losses.
double unit_term(double ps, double pp, bool ts, bool tp) {
  const double qs = clamp_prob(ps);
  const double qp = clamp_prob(pp);
  const double ls = ts ? std::log(qs) : std::log(1.0 - qs);
  const double lp = tp ? std::log(qp) : std::log(1.0 - qp);
  return -(ls + lp);
}

void check_same_shape(const RealMatrix& probs, const BinaryMatrix& labels, const char* what) {
  if (probs.rows() != labels.rows() || probs.cols() != labels.cols()) {
    throw DataError(std::string(what) + ": probabilities are " + std::to_string(probs.rows()) + "x" +
                    std::to_string(probs.cols()) + " but labels are " + std::to_string(labels.rows()) + "x" +
                    std::to_string(labels.cols()));
  }
}

void check_members(const RealMatrix& member_probs, const BinaryMatrix& plu_values, const char* what) {
  if (member_probs.rows() != plu_values.rows() || member_probs.cols() != 2 * plu_values.cols()) {
    throw DataError(std::string(what) + ": member probabilities must be n_b x 2m for n_b x m unit values");
  }
}

double inverse_batch(std::size_t rows) { return rows ? 1.0 / static_cast<double>(rows) : 0.0; }

LossResult binary_cross_entropy(const RealMatrix& probs, const BinaryMatrix& labels) {
  const auto n = probs.rows();
  const auto cols = probs.cols();
  const double scale = inverse_batch(n);
  LossResult r;
  r.grad_logits = RealMatrix(n, cols);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const bool z = labels(i, j) != 0;
      const double p = probs(i, j);
      row_sum += nll(p, z);
      r.grad_logits(i, j) = (p - (z ? 1.0 : 0.0)) * scale;
    }
    total += row_sum;
  }
  r.value = n ? total / static_cast<double>(n) : 0.0;
  return r;
}

enum class UnitRule { AssumeNegative, AssumePositive, MinRisk };

LossResult unit_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values, UnitRule rule,
                     const TieOrder& ties) {
  const auto n = member_probs.rows();
  const auto m = plu_values.cols();
  const double scale = inverse_batch(n);
  LossResult r;
  r.grad_logits = RealMatrix(n, 2 * m);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      const double ps = member_probs(i, 2 * u);
      const double pp = member_probs(i, 2 * u + 1);
      bool ts = false, tp = false;
      if (plu_values(i, u) != 0) {
        switch (rule) {
          case UnitRule::AssumeNegative:
            break;
          case UnitRule::AssumePositive:
            ts = tp = true;
            break;
          case UnitRule::MinRisk: {
            std::array<double, 3> risk{};
            risk[static_cast<int>(Scenario::A)] = unit_term(ps, pp, true, false);
            risk[static_cast<int>(Scenario::B)] = unit_term(ps, pp, false, true);
            risk[static_cast<int>(Scenario::C)] = unit_term(ps, pp, true, true);
            Scenario best = ties[0];
            for (std::size_t k = 1; k < ties.size(); ++k) {
              if (risk[static_cast<int>(ties[k])] < risk[static_cast<int>(best)]) best = ties[k];
            }
            ts = best != Scenario::B;
            tp = best != Scenario::A;
            r.chosen_scenario.push_back({i, u, best});
            break;
          }
        }
      }
      row_sum += unit_term(ps, pp, ts, tp);
      r.grad_logits(i, 2 * u) = (ps - (ts ? 1.0 : 0.0)) * scale;
      r.grad_logits(i, 2 * u + 1) = (pp - (tp ? 1.0 : 0.0)) * scale;
    }
    total += row_sum;
  }
  r.value = n ? total / static_cast<double>(n) : 0.0;
  return r;
}

}  // namespace

LossResult bce_loss(const RealMatrix& probs, const BinaryMatrix& labels) {
  check_same_shape(probs, labels, "bce_loss");
  return binary_cross_entropy(probs, labels);
}

LossResult fu_loss(const RealMatrix& observed_probs, const BinaryMatrix& observed_labels) {
  check_same_shape(observed_probs, observed_labels, "fu_loss");
  return binary_cross_entropy(observed_probs, observed_labels);
}

LossResult an_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values) {
  check_members(member_probs, plu_values, "an_loss");
  return unit_loss(member_probs, plu_values, UnitRule::AssumeNegative, kDefaultTieOrder);
}

LossResult ap_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values) {
  check_members(member_probs, plu_values, "ap_loss");
  return unit_loss(member_probs, plu_values, UnitRule::AssumePositive, kDefaultTieOrder);
}

LossResult plul_loss(const RealMatrix& member_probs, const BinaryMatrix& plu_values, const TieOrder& ties) {
  check_members(member_probs, plu_values, "plul_loss");
  auto sorted = ties;
  std::ranges::sort(sorted);
  if (sorted != TieOrder{Scenario::A, Scenario::B, Scenario::C}) {
    throw ConfigError("tie order must be a permutation of the scenarios a, b, c");
  }
  return unit_loss(member_probs, plu_values, UnitRule::MinRisk, ties);
}

LossResult clplu_risk(const RealMatrix& probs, const ConcealedDataset& data, std::span<const std::size_t> rows,
                      LossMode mode, const TieOrder& ties) {
  if (mode == LossMode::FullBce) {
    throw ConfigError("clplu_risk needs a unit loss mode (an, ap or plul); full_bce is not defined on concealed data");
  }
  const auto nb = rows.size();
  const auto L = data.num_labels();
  if (probs.rows() != nb || probs.cols() != L) {
    throw DataError("clplu_risk: probabilities must be " + std::to_string(nb) + "x" + std::to_string(L));
  }
  const auto& observed = data.observed_index();
  const auto c = observed.size();
  const auto m = data.num_units();

  RealMatrix obs_probs(nb, c);
  BinaryMatrix obs_labels(nb, c);
  RealMatrix member_probs(nb, 2 * m);
  BinaryMatrix unit_values(nb, m);
  for (std::size_t r = 0; r < nb; ++r) {
    const auto i = rows[r];
    if (i >= data.num_instances()) throw DataError("clplu_risk: row index out of range");
    for (std::size_t k = 0; k < c; ++k) {
      obs_probs(r, k) = probs(r, observed[k]);
      obs_labels(r, k) = data.observed_labels()(i, k);
    }
    for (std::size_t u = 0; u < m; ++u) {
      member_probs(r, 2 * u) = probs(r, data.partner(i, u));
      member_probs(r, 2 * u + 1) = probs(r, data.privacy(u));
      unit_values(r, u) = data.plu_values()(i, u);
    }
  }

  auto fu = fu_loss(obs_probs, obs_labels);
  LossResult plu;
  switch (mode) {
    case LossMode::An:
      plu = an_loss(member_probs, unit_values);
      break;
    case LossMode::Ap:
      plu = ap_loss(member_probs, unit_values);
      break;
    default:
      plu = plul_loss(member_probs, unit_values, ties);
      break;
  }

  LossResult out;
  out.value = fu.value + plu.value;
  out.grad_logits = RealMatrix(nb, L);
  for (std::size_t r = 0; r < nb; ++r) {
    const auto i = rows[r];
    for (std::size_t k = 0; k < c; ++k) out.grad_logits(r, observed[k]) = fu.grad_logits(r, k);
    for (std::size_t u = 0; u < m; ++u) {
      out.grad_logits(r, data.partner(i, u)) = plu.grad_logits(r, 2 * u);
      out.grad_logits(r, data.privacy(u)) = plu.grad_logits(r, 2 * u + 1);
    }
  }
  out.chosen_scenario = std::move(plu.chosen_scenario);
  // Report instances in the caller's row numbering.
  for (auto& choice : out.chosen_scenario) choice.instance = rows[choice.instance];
  return out;
}

LossResult clplu_risk(const RealMatrix& probs, const ConcealedDataset& data, LossMode mode, const TieOrder& ties) {
  std::vector<std::size_t> rows(data.num_instances());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return clplu_risk(probs, data, rows, mode, ties);
}

}  // namespace clplu
