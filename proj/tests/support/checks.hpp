#pragma once

// Randomized checks shared by the property tests and the acceptance runner.
// Each returns a summary; callers decide how to report it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "clplu/conceal.hpp"
#include "clplu/losses.hpp"
#include "clplu/metrics.hpp"
#include "clplu/model.hpp"
#include "clplu/rng.hpp"
#include "clplu/synthetic.hpp"
#include "clplu/trainer.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace checks {

/// A random small concealed batch: every row of the dataset is used.
struct RandomBatch {
  clplu::ConcealResult concealed;
  clplu::RealMatrix logits;
};

inline RandomBatch random_batch(clplu::Rng& rng, bool with_units) {
  const auto n = gen::between(rng, 1, 6);
  const auto L = gen::between(rng, 2, 8);
  const auto ds = gen::dataset(rng, n, 1, L);
  const auto mode = rng.uniform01() < 0.5 ? clplu::PairingMode::DatasetFixed : clplu::PairingMode::PerInstance;
  const auto scheme = with_units ? gen::scheme(rng, L, mode) : clplu::PluScheme(L, {});
  return {clplu::conceal(ds, scheme), gen::gaussian(rng, n, L, 2.0)};
}

inline clplu::RealMatrix sigmoid_of(const clplu::RealMatrix& logits) {
  clplu::RealMatrix p(logits.rows(), logits.cols());
  for (std::size_t k = 0; k < p.size(); ++k) p.values()[k] = oracle::sigmoid(logits.values()[k]);
  return p;
}

/// Loss value and analytic gradient for `mode` at the given logits.
inline clplu::LossResult loss_at(const RandomBatch& b, const clplu::RealMatrix& logits, clplu::LossMode mode) {
  const auto probs = sigmoid_of(logits);
  if (mode == clplu::LossMode::FullBce) return clplu::bce_loss(probs, clplu::reconstruct_labels(b.concealed.data, b.concealed.truth));
  return clplu::clplu_risk(probs, b.concealed.data, mode);
}

/// Max relative error between analytic and central-difference gradients over
/// `batches` random batches.
inline double max_gradient_error(clplu::LossMode mode, std::uint64_t seed, std::size_t batches = 50,
                                 double h = 1e-6) {
  clplu::Rng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < batches; ++t) {
    const auto b = random_batch(rng, mode != clplu::LossMode::FullBce);
    const auto analytic = loss_at(b, b.logits, mode).grad_logits;
    const auto numeric = oracle::numeric_gradient(
        [&](const std::vector<double>& x) {
          return loss_at(b, clplu::RealMatrix(b.logits.rows(), b.logits.cols(), x), mode).value;
        },
        std::vector<double>(b.logits.values().begin(), b.logits.values().end()), h);
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      worst = std::max(worst, oracle::relative_error(analytic.values()[k], numeric[k]));
    }
  }
  return worst;
}

struct GridResult {
  std::size_t cells = 0;
  std::size_t mismatches = 0;
};

/// Every (p_s, p_p) in {0.1, ..., 0.9}^2 and both unit bits, one unit per call.
inline GridResult plul_grid() {
  GridResult r;
  for (int a = 1; a <= 9; ++a) {
    for (int c = 1; c <= 9; ++c) {
      for (const std::uint8_t bit : {0, 1}) {
        const double ps = a / 10.0, pp = c / 10.0;
        const clplu::RealMatrix probs(1, 2, std::vector<double>{ps, pp});
        const clplu::BinaryMatrix unit(1, 1, bit);
        const double got = clplu::plul_loss(probs, unit).value;
        ++r.cells;
        if (got != oracle::plul_unit(ps, pp, bit != 0)) ++r.mismatches;
      }
    }
  }
  return r;
}

/// Batches where PLUL exceeds AP (must be none).
inline std::size_t plul_above_ap(std::uint64_t seed, std::size_t batches = 100) {
  clplu::Rng rng(seed);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < batches; ++t) {
    const auto b = random_batch(rng, true);
    const auto probs = sigmoid_of(b.logits);
    const auto plul = clplu::clplu_risk(probs, b.concealed.data, clplu::LossMode::Plul).value;
    const auto ap = clplu::clplu_risk(probs, b.concealed.data, clplu::LossMode::Ap).value;
    if (!(plul <= ap)) ++violations;
  }
  return violations;
}

struct MetricCheck {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

/// Library metrics vs brute-force oracles on random instances (L <= 10), in
/// blocks so that per-block means are compared as well as per-instance values.
inline MetricCheck metric_oracles(std::uint64_t seed, std::size_t instances = 200) {
  clplu::Rng rng(seed);
  MetricCheck r;
  auto note = [&](const char* what, std::size_t i) {
    ++r.mismatches;
    if (r.first_mismatch.empty()) r.first_mismatch = std::string(what) + " at instance " + std::to_string(i);
  };
  for (std::size_t i = 0; i < instances; ++i) {
    const auto L = gen::between(rng, 2, 10);
    const bool ties = rng.uniform01() < 0.5;
    const auto s = ties ? gen::tied_scores(rng, 1, L) : gen::probabilities(rng, 1, L);
    const auto z = gen::bits(rng, 1, L, rng.uniform(0.1, 0.9));
    const auto pred = gen::bits(rng, 1, L, 0.5);
    ++r.instances;
    if (clplu::hamming_loss(pred, z) != oracle::hamming(pred, z)) note("hamming_loss", i);
    const auto rl = clplu::ranking_loss(s, z);
    const auto rl_o = oracle::ranking_loss(s, z);
    if (rl.value != rl_o.value || rl.evaluated != rl_o.evaluated) note("ranking_loss", i);
    const auto oe = clplu::one_error(s, z);
    const auto oe_o = oracle::one_error(s, z);
    if (oe.value != oe_o.value || oe.evaluated != oe_o.evaluated) note("one_error", i);
    const auto cov = clplu::coverage(s, z);
    const auto cov_o = oracle::coverage(s, z);
    if (cov.value != cov_o.value || cov.evaluated != cov_o.evaluated) note("coverage", i);
    const auto ap = clplu::average_precision(s, z);
    const auto ap_o = oracle::average_precision(s, z);
    if (ap.value != ap_o.value || ap.evaluated != ap_o.evaluated) note("average_precision", i);
  }
  // Whole-matrix means over a fixed-width block.
  const std::size_t L = 7;
  const auto s = gen::tied_scores(rng, instances, L);
  const auto z = gen::bits(rng, instances, L, 0.4);
  const auto pred = gen::bits(rng, instances, L, 0.5);
  if (clplu::hamming_loss(pred, z) != oracle::hamming(pred, z)) note("hamming_loss (block)", 0);
  if (clplu::ranking_loss(s, z).value != oracle::ranking_loss(s, z).value) note("ranking_loss (block)", 0);
  if (clplu::one_error(s, z).value != oracle::one_error(s, z).value) note("one_error (block)", 0);
  if (clplu::coverage(s, z).value != oracle::coverage(s, z).value) note("coverage (block)", 0);
  if (clplu::average_precision(s, z).value != oracle::average_precision(s, z).value) note("average_precision (block)", 0);
  return r;
}

/// Ranking metrics of sigmoid(logits) vs sigmoid(2 * logits + 1).
inline std::size_t argsort_violations(std::uint64_t seed, std::size_t trials = 50) {
  clplu::Rng rng(seed);
  std::size_t bad = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto n = gen::between(rng, 1, 20);
    const auto L = gen::between(rng, 2, 10);
    auto logits = gen::gaussian(rng, n, L);
    // Duplicate some logits to create ties that the transform must preserve.
    for (std::size_t i = 0; i < n; ++i) logits(i, L - 1) = logits(i, 0);
    const auto z = gen::bits(rng, n, L, 0.4);
    auto transformed = logits;
    for (auto& v : transformed.values()) v = 2 * v + 1;
    const auto a = sigmoid_of(logits);
    const auto b = sigmoid_of(transformed);
    if (clplu::ranking_loss(a, z).value != clplu::ranking_loss(b, z).value) ++bad;
    if (clplu::one_error(a, z).value != clplu::one_error(b, z).value) ++bad;
    if (clplu::coverage(a, z).value != clplu::coverage(b, z).value) ++bad;
    if (clplu::average_precision(a, z).value != clplu::average_precision(b, z).value) ++bad;
  }
  return bad;
}

struct ConcealCheck {
  std::size_t pairs = 0;
  std::size_t or_violations = 0;
  std::size_t audit_failures = 0;
  std::size_t count_violations = 0;
};

/// Random (dataset, scheme) pairs: OR truth table at every position, audit, c + 2m = L.
inline ConcealCheck conceal_invariants(std::uint64_t seed, std::size_t pairs = 20) {
  clplu::Rng rng(seed);
  ConcealCheck r;
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto n = gen::between(rng, 1, 60);
    const auto L = gen::between(rng, 2, 16);
    const auto ds = gen::dataset(rng, n, gen::between(rng, 1, 5), L, rng.uniform(0.05, 0.95));
    const auto mode = t % 2 ? clplu::PairingMode::PerInstance : clplu::PairingMode::DatasetFixed;
    const auto scheme = gen::scheme(rng, L, mode);
    const auto c = clplu::conceal(ds, scheme);
    ++r.pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t u = 0; u < scheme.num_units(); ++u) {
        const auto s = c.data.partner(i, u);
        const auto p = c.data.privacy(u);
        const std::uint8_t expect = (ds.labels()(i, s) == 1 || ds.labels()(i, p) == 1) ? 1 : 0;
        if (c.data.plu_values()(i, u) != expect) ++r.or_violations;
        if (c.truth.partner_truth(i, u) != ds.labels()(i, s) || c.truth.privacy_truth(i, u) != ds.labels()(i, p)) {
          ++r.or_violations;
        }
      }
      for (std::size_t k = 0; k < c.data.num_observed(); ++k) {
        if (c.data.observed_labels()(i, k) != ds.labels()(i, c.data.observed_index()[k])) ++r.or_violations;
      }
    }
    if (!clplu::audit_no_leak(c.data).passed) ++r.audit_failures;
    if (c.data.num_observed() + 2 * c.data.num_units() != L) ++r.count_violations;
  }
  return r;
}

/// Trains FULL_BCE and every unit mode on unit-free data; counts models or
/// histories that differ from the FULL_BCE run.
inline std::size_t reduction_mismatches(const clplu::MultiLabelDataset& ds, std::uint64_t seed, std::size_t epochs) {
  const auto c = clplu::conceal(ds, clplu::PluScheme(ds.num_labels(), {}));
  clplu::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  cfg.lr = 0.1;
  cfg.weight_decay = 1e-4;
  cfg.seed = seed;
  cfg.lr_decay_epochs = {epochs / 3, 2 * epochs / 3};
  cfg.loss_mode = clplu::LossMode::FullBce;
  const auto ref = clplu::train(c.data, nullptr, cfg);
  std::size_t mismatches = 0;
  for (const auto mode : {clplu::LossMode::An, clplu::LossMode::Ap, clplu::LossMode::Plul}) {
    cfg.loss_mode = mode;
    const auto got = clplu::train(c.data, nullptr, cfg);
    if (!(got.model == ref.model)) ++mismatches;
    for (std::size_t e = 0; e < epochs; ++e) {
      if (got.history.epochs[e].train_loss != ref.history.epochs[e].train_loss) {
        ++mismatches;
        break;
      }
    }
  }
  return mismatches;
}

}  // namespace checks
