#include "clplu/metrics.hpp"

#include <algorithm>
#include <functional>
#include <nlohmann/json.hpp>
#include <numeric>
#include <string>

#include "clplu/error.hpp"

namespace clplu {

namespace {

void check_shapes(const RealMatrix& scores, const BinaryMatrix& truth, const char* what) {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols()) {
    throw DataError(std::string(what) + ": scores and truth shapes differ");
  }
}

// Scores of one instance sorted descending, for pessimistic rank queries.
struct SortedScores {
  std::vector<double> all;
  std::vector<double> positives;

  void assign(std::span<const double> s, std::span<const std::uint8_t> z) {
    all.assign(s.begin(), s.end());
    positives.clear();
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (z[j]) positives.push_back(s[j]);
    }
    std::ranges::sort(all, std::greater<>());
    std::ranges::sort(positives, std::greater<>());
  }

  // |{k : s_k >= v}| over a descending list.
  static std::size_t at_least(const std::vector<double>& desc, double v) {
    return static_cast<std::size_t>(
        std::upper_bound(desc.begin(), desc.end(), v, std::greater<>()) - desc.begin());
  }
};

std::size_t count_positives(std::span<const std::uint8_t> z) {
  return static_cast<std::size_t>(std::count(z.begin(), z.end(), std::uint8_t{1}));
}

}  // namespace

double hamming_loss(const BinaryMatrix& predictions, const BinaryMatrix& truth) {
  if (predictions.rows() != truth.rows() || predictions.cols() != truth.cols()) {
    throw DataError("hamming_loss: prediction and truth shapes differ");
  }
  if (truth.size() == 0) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) wrong += predictions.values()[k] != truth.values()[k];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

MetricValue ranking_loss(const RealMatrix& scores, const BinaryMatrix& truth) {
  check_shapes(scores, truth, "ranking_loss");
  MetricValue out;
  double total = 0.0;
  std::vector<double> neg;
  std::vector<double> pos;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto s = scores.row(i);
    const auto z = truth.row(i);
    pos.clear();
    neg.clear();
    for (std::size_t j = 0; j < s.size(); ++j) (z[j] ? pos : neg).push_back(s[j]);
    if (pos.empty() || neg.empty()) {
      ++out.skipped;
      continue;
    }
    std::ranges::sort(neg);
    // For each positive: negatives strictly above it, and negatives tied with it.
    std::size_t above = 0, tied = 0;
    for (const double p : pos) {
      const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
      const auto hi = std::upper_bound(lo, neg.end(), p);
      above += static_cast<std::size_t>(neg.end() - hi);
      tied += static_cast<std::size_t>(hi - lo);
    }
    const double pairs = static_cast<double>(pos.size()) * static_cast<double>(neg.size());
    total += (static_cast<double>(above) + 0.5 * static_cast<double>(tied)) / pairs;
    ++out.evaluated;
  }
  out.value = out.evaluated ? total / static_cast<double>(out.evaluated) : 0.0;
  return out;
}

MetricValue one_error(const RealMatrix& scores, const BinaryMatrix& truth) {
  check_shapes(scores, truth, "one_error");
  MetricValue out;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto s = scores.row(i);
    const auto z = truth.row(i);
    if (count_positives(z) == 0) {
      ++out.skipped;
      continue;
    }
    // max_element returns the first maximum: lowest index wins ties.
    const auto top = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    errors += z[top] ? 0 : 1;
    ++out.evaluated;
  }
  out.value = out.evaluated ? static_cast<double>(errors) / static_cast<double>(out.evaluated) : 0.0;
  return out;
}

MetricValue coverage(const RealMatrix& scores, const BinaryMatrix& truth) {
  check_shapes(scores, truth, "coverage");
  MetricValue out;
  const auto L = scores.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto s = scores.row(i);
    const auto z = truth.row(i);
    // The deepest positive is the one with the lowest score.
    bool any = false;
    double lowest = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      if (z[j] && (!any || s[j] < lowest)) {
        lowest = s[j];
        any = true;
      }
    }
    if (!any) {
      ++out.skipped;
      continue;
    }
    std::size_t rank = 0;
    for (std::size_t j = 0; j < L; ++j) rank += s[j] >= lowest;
    total += L > 1 ? static_cast<double>(rank - 1) / static_cast<double>(L - 1) : 0.0;
    ++out.evaluated;
  }
  out.value = out.evaluated ? total / static_cast<double>(out.evaluated) : 0.0;
  return out;
}

MetricValue average_precision(const RealMatrix& scores, const BinaryMatrix& truth) {
  check_shapes(scores, truth, "average_precision");
  MetricValue out;
  double total = 0.0;
  SortedScores sorted;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto s = scores.row(i);
    const auto z = truth.row(i);
    const auto n_pos = count_positives(z);
    if (n_pos == 0) {
      ++out.skipped;
      continue;
    }
    sorted.assign(s, z);
    double sum = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!z[j]) continue;
      const auto rank = SortedScores::at_least(sorted.all, s[j]);
      const auto pos_above = SortedScores::at_least(sorted.positives, s[j]);
      sum += static_cast<double>(pos_above) / static_cast<double>(rank);
    }
    total += sum / static_cast<double>(n_pos);
    ++out.evaluated;
  }
  out.value = out.evaluated ? total / static_cast<double>(out.evaluated) : 0.0;
  return out;
}

double plu_label_accuracy(const RealMatrix& probs, const ConcealedDataset& data, const SealedTruth& truth,
                          double threshold) {
  if (probs.rows() != data.num_instances() || probs.cols() != data.num_labels()) {
    throw DataError("plu_label_accuracy: probabilities must be n x L");
  }
  if (truth.num_instances() != data.num_instances() || truth.num_units() != data.num_units()) {
    throw DataError("plu_label_accuracy: sealed truth does not match the dataset");
  }
  const auto positions = 2 * data.num_instances() * data.num_units();
  if (positions == 0) return 1.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.num_instances(); ++i) {
    for (std::size_t u = 0; u < data.num_units(); ++u) {
      const std::uint8_t ps = probs(i, data.partner(i, u)) >= threshold ? 1 : 0;
      const std::uint8_t pp = probs(i, data.privacy(u)) >= threshold ? 1 : 0;
      correct += ps == truth.partner_truth(i, u);
      correct += pp == truth.privacy_truth(i, u);
    }
  }
  return static_cast<double>(correct) / static_cast<double>(positions);
}

MetricsReport compute_report(const RealMatrix& scores, const BinaryMatrix& truth, double threshold) {
  check_shapes(scores, truth, "compute_report");
  MetricsReport report;
  report.hamming_loss = hamming_loss(predict_labels(scores, threshold), truth);

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < truth.rows(); ++i) {
    const auto pos = count_positives(truth.row(i));
    if (pos > 0 && pos < truth.cols()) eligible.push_back(i);
  }
  RealMatrix s(eligible.size(), scores.cols());
  BinaryMatrix z(eligible.size(), truth.cols());
  for (std::size_t r = 0; r < eligible.size(); ++r) {
    std::ranges::copy(scores.row(eligible[r]), s.row(r).begin());
    std::ranges::copy(truth.row(eligible[r]), z.row(r).begin());
  }
  report.average_precision = average_precision(s, z).value;
  report.one_error = one_error(s, z).value;
  report.coverage = coverage(s, z).value;
  report.ranking_loss = ranking_loss(s, z).value;
  report.n_evaluated = eligible.size();
  report.n_skipped = truth.rows() - eligible.size();
  return report;
}

MetricsReport evaluate(const LinearModel& model, const EvaluationSet& set, double threshold) {
  if (!set.data) throw DataError("evaluate: no dataset");
  const auto& data = *set.data;
  if (model.num_features() != data.num_features() || model.num_labels() != data.num_labels()) {
    throw DataError("evaluate: model is " + std::to_string(model.num_labels()) + "x" +
                    std::to_string(model.num_features()) + " but data has L=" + std::to_string(data.num_labels()) +
                    ", d=" + std::to_string(data.num_features()));
  }
  const auto probs = predict_probs(model, data.features());
  if (set.truth) {
    auto report = compute_report(probs, reconstruct_labels(data, *set.truth), threshold);
    report.plu_label_accuracy = plu_label_accuracy(probs, data, *set.truth, threshold);
    return report;
  }
  const auto& observed = data.observed_index();
  RealMatrix obs_probs(data.num_instances(), observed.size());
  for (std::size_t i = 0; i < data.num_instances(); ++i) {
    for (std::size_t k = 0; k < observed.size(); ++k) obs_probs(i, k) = probs(i, observed[k]);
  }
  return compute_report(obs_probs, data.observed_labels(), threshold);
}

std::string report_to_json(const MetricsReport& report, int indent) {
  nlohmann::ordered_json j;
  j["average_precision"] = report.average_precision;
  j["hamming_loss"] = report.hamming_loss;
  j["one_error"] = report.one_error;
  j["coverage"] = report.coverage;
  j["ranking_loss"] = report.ranking_loss;
  if (report.plu_label_accuracy) j["plu_label_accuracy"] = *report.plu_label_accuracy;
  j["n_evaluated"] = report.n_evaluated;
  j["n_skipped"] = report.n_skipped;
  return j.dump(indent);
}

MetricsReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.average_precision = j.at("average_precision").get<double>();
    r.hamming_loss = j.at("hamming_loss").get<double>();
    r.one_error = j.at("one_error").get<double>();
    r.coverage = j.at("coverage").get<double>();
    r.ranking_loss = j.at("ranking_loss").get<double>();
    if (j.contains("plu_label_accuracy")) r.plu_label_accuracy = j["plu_label_accuracy"].get<double>();
    r.n_evaluated = j.value("n_evaluated", std::size_t{0});
    r.n_skipped = j.value("n_skipped", std::size_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed metrics JSON: ") + e.what());
  }
}

}  // namespace clplu
