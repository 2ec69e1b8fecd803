#include "clplu/conceal.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "clplu/error.hpp"
#include "clplu/rng.hpp"

namespace clplu {

PairingMode parse_pairing_mode(std::string_view name) {
  if (name == "dataset_fixed" || name == "DATASET_FIXED" || name == "fixed") return PairingMode::DatasetFixed;
  if (name == "per_instance" || name == "PER_INSTANCE") return PairingMode::PerInstance;
  throw ConfigError("unknown pairing mode '" + std::string(name) + "' (expected dataset_fixed or per_instance)");
}

std::string_view to_string(PairingMode mode) {
  return mode == PairingMode::DatasetFixed ? "dataset_fixed" : "per_instance";
}

PluScheme::PluScheme(std::size_t num_labels, std::vector<PluUnit> units, PairingMode mode, std::uint64_t seed)
    : num_labels_(num_labels), units_(std::move(units)), mode_(mode), seed_(seed) {
  if (2 * units_.size() > num_labels_) {
    throw ConfigError("PLU count m=" + std::to_string(units_.size()) + " violates 2m <= L (L=" +
                      std::to_string(num_labels_) + ")");
  }
  std::vector<bool> used(num_labels_, false);
  for (const auto& u : units_) {
    for (const auto idx : {u.partner, u.privacy}) {
      if (idx >= num_labels_) {
        throw ConfigError("unit label index " + std::to_string(idx) + " out of range (L=" +
                          std::to_string(num_labels_) + ")");
      }
      if (used[idx]) throw ConfigError("label " + std::to_string(idx) + " appears in more than one unit slot");
      used[idx] = true;
    }
  }
}

std::vector<std::size_t> PluScheme::privacy_indices() const {
  std::vector<std::size_t> out;
  for (const auto& u : units_) out.push_back(u.privacy);
  return out;
}

std::vector<std::size_t> PluScheme::partner_indices() const {
  std::vector<std::size_t> out;
  for (const auto& u : units_) out.push_back(u.partner);
  return out;
}

std::vector<std::size_t> PluScheme::observed_indices() const {
  std::vector<bool> member(num_labels_, false);
  for (const auto& u : units_) member[u.partner] = member[u.privacy] = true;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < num_labels_; ++j) {
    if (!member[j]) out.push_back(j);
  }
  return out;
}

PluScheme build_scheme(std::size_t num_labels, std::span<const std::size_t> privacy_indices, PairingMode mode,
                       std::uint64_t seed) {
  const auto m = privacy_indices.size();
  std::vector<bool> is_private(num_labels, false);
  for (const auto p : privacy_indices) {
    if (p >= num_labels) {
      throw ConfigError("privacy index " + std::to_string(p) + " out of range (L=" + std::to_string(num_labels) + ")");
    }
    if (is_private[p]) throw ConfigError("duplicate privacy index " + std::to_string(p));
    is_private[p] = true;
  }
  if (2 * m > num_labels) {
    throw ConfigError("too few non-privacy labels to pair: 2m=" + std::to_string(2 * m) + " > L=" +
                      std::to_string(num_labels));
  }
  std::vector<std::size_t> pool;
  for (std::size_t j = 0; j < num_labels; ++j) {
    if (!is_private[j]) pool.push_back(j);
  }
  // Partial Fisher-Yates: the first m draws are a uniform sample without replacement.
  Rng rng(derive_seed(seed, 0x5c4e3e));
  std::vector<PluUnit> units;
  units.reserve(m);
  for (std::size_t u = 0; u < m; ++u) {
    const auto j = u + static_cast<std::size_t>(rng.uniform_index(pool.size() - u));
    std::swap(pool[u], pool[j]);
    units.push_back({pool[u], privacy_indices[u]});
  }
  return PluScheme(num_labels, std::move(units), mode, seed);
}

std::vector<std::size_t> sample_privacy_indices(std::size_t num_labels, std::size_t count, std::uint64_t seed) {
  if (count > num_labels) throw ConfigError("cannot sample more privacy labels than labels");
  std::vector<std::size_t> pool(num_labels);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x971ace));
  for (std::size_t u = 0; u < count; ++u) {
    const auto j = u + static_cast<std::size_t>(rng.uniform_index(num_labels - u));
    std::swap(pool[u], pool[j]);
  }
  pool.resize(count);
  std::ranges::sort(pool);
  return pool;
}

ConcealedDataset::ConcealedDataset(std::shared_ptr<const RealMatrix> features, PluScheme scheme,
                                   std::vector<std::size_t> observed_index, BinaryMatrix observed_labels,
                                   BinaryMatrix plu_values, IndexMatrix partners)
    : features_(std::move(features)),
      scheme_(std::move(scheme)),
      observed_index_(std::move(observed_index)),
      observed_labels_(std::move(observed_labels)),
      plu_values_(std::move(plu_values)),
      partners_(std::move(partners)) {
  if (!features_) throw DataError("concealed dataset needs a feature matrix");
  const auto n = features_->rows();
  const auto m = scheme_.num_units();
  if (observed_labels_.rows() != n || observed_labels_.cols() != observed_index_.size()) {
    throw DataError("observed label matrix shape does not match features / observed index map");
  }
  if (plu_values_.rows() != n || plu_values_.cols() != m) throw DataError("PLU value matrix must be n x m");
  if (partners_.rows() != n || partners_.cols() != m) throw DataError("partner table must be n x m");
  for (const auto j : observed_index_) {
    if (j >= scheme_.num_labels()) throw DataError("observed index out of range");
  }
  for (const auto v : observed_labels_.values()) {
    if (v > 1) throw DataError("observed labels must be 0 or 1");
  }
  for (const auto v : plu_values_.values()) {
    if (v > 1) throw DataError("PLU values must be 0 or 1");
  }
  for (const auto s : partners_.values()) {
    if (s >= scheme_.num_labels()) throw DataError("partner index out of range");
  }
}

ConcealedDataset ConcealedDataset::subset(std::span<const std::size_t> indices) const {
  const auto c = num_observed();
  const auto m = num_units();
  RealMatrix x(indices.size(), num_features());
  BinaryMatrix y(indices.size(), c);
  BinaryMatrix v(indices.size(), m);
  IndexMatrix s(indices.size(), m);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = indices[r];
    if (src >= num_instances()) throw DataError("subset index out of range");
    std::ranges::copy(features_->row(src), x.row(r).begin());
    std::ranges::copy(observed_labels_.row(src), y.row(r).begin());
    std::ranges::copy(plu_values_.row(src), v.row(r).begin());
    std::ranges::copy(partners_.row(src), s.row(r).begin());
  }
  return ConcealedDataset(std::make_shared<const RealMatrix>(std::move(x)), scheme_, observed_index_, std::move(y),
                          std::move(v), std::move(s));
}

bool ConcealedDataset::operator==(const ConcealedDataset& other) const {
  return *features_ == *other.features_ && scheme_ == other.scheme_ && observed_index_ == other.observed_index_ &&
         observed_labels_ == other.observed_labels_ && plu_values_ == other.plu_values_ &&
         partners_ == other.partners_;
}

SealedTruth::SealedTruth(BinaryMatrix hidden) : hidden_(std::move(hidden)) {
  if (hidden_.cols() % 2 != 0) throw DataError("sealed truth must have 2m columns");
  for (const auto v : hidden_.values()) {
    if (v > 1) throw DataError("sealed truth entries must be 0 or 1");
  }
}

SealedTruth SealedTruth::subset(std::span<const std::size_t> indices) const {
  BinaryMatrix h(indices.size(), hidden_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= hidden_.rows()) throw DataError("subset index out of range");
    std::ranges::copy(hidden_.row(indices[r]), h.row(r).begin());
  }
  return SealedTruth(std::move(h));
}

ConcealResult conceal(const MultiLabelDataset& ds, const PluScheme& scheme) {
  if (scheme.num_labels() != ds.num_labels()) {
    throw DataError("scheme is built for L=" + std::to_string(scheme.num_labels()) + " but dataset has L=" +
                    std::to_string(ds.num_labels()));
  }
  const auto n = ds.num_instances();
  const auto m = scheme.num_units();
  const auto observed = scheme.observed_indices();
  const auto& z = ds.labels();

  BinaryMatrix y(n, observed.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < observed.size(); ++k) y(i, k) = z(i, observed[k]);
  }

  IndexMatrix partners(n, m);
  const auto fixed = scheme.partner_indices();
  Rng rng(derive_seed(scheme.seed(), 0x9a1d));
  std::vector<std::size_t> assignment = fixed;
  for (std::size_t i = 0; i < n; ++i) {
    if (scheme.mode() == PairingMode::PerInstance) {
      assignment = fixed;
      rng.shuffle(std::span<std::size_t>(assignment));
    }
    std::ranges::copy(assignment, partners.row(i).begin());
  }

  BinaryMatrix values(n, m);
  BinaryMatrix hidden(n, 2 * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t u = 0; u < m; ++u) {
      const auto zs = z(i, partners(i, u));
      const auto zp = z(i, scheme.units()[u].privacy);
      values(i, u) = plu_truth(zs, zp);
      hidden(i, 2 * u) = zs;
      hidden(i, 2 * u + 1) = zp;
    }
  }
  return {ConcealedDataset(ds.shared_features(), scheme, observed, std::move(y), std::move(values),
                           std::move(partners)),
          SealedTruth(std::move(hidden))};
}

BinaryMatrix reconstruct_labels(const ConcealedDataset& cd, const SealedTruth& truth) {
  if (truth.num_instances() != cd.num_instances() || truth.num_units() != cd.num_units()) {
    throw DataError("sealed truth does not match the concealed dataset");
  }
  BinaryMatrix z(cd.num_instances(), cd.num_labels());
  for (std::size_t i = 0; i < cd.num_instances(); ++i) {
    for (std::size_t k = 0; k < cd.num_observed(); ++k) z(i, cd.observed_index()[k]) = cd.observed_labels()(i, k);
    for (std::size_t u = 0; u < cd.num_units(); ++u) {
      z(i, cd.partner(i, u)) = truth.partner_truth(i, u);
      z(i, cd.privacy(u)) = truth.privacy_truth(i, u);
    }
  }
  return z;
}

AuditReport audit_no_leak(const ConcealedDataset& cd) {
  AuditReport report;
  const auto& scheme = cd.scheme();
  std::vector<bool> is_private(scheme.num_labels(), false);
  std::vector<bool> is_member(scheme.num_labels(), false);
  for (const auto& u : scheme.units()) {
    is_private[u.privacy] = true;
    is_member[u.privacy] = is_member[u.partner] = true;
  }
  auto flag = [&](std::size_t idx, std::string msg) {
    report.passed = false;
    if (std::ranges::find(report.leaked_indices, idx) == report.leaked_indices.end()) {
      report.leaked_indices.push_back(idx);
    }
    report.violations.push_back(std::move(msg));
  };

  for (const auto j : cd.observed_index()) {
    if (is_private[j]) {
      flag(j, "privacy label " + std::to_string(j) + " is exported in the observed index map");
    } else if (is_member[j]) {
      // An individually observed partner reveals z_p whenever z_s = 0 and the unit is 1.
      flag(j, "unit partner " + std::to_string(j) + " is exported in the observed index map");
    }
  }
  for (std::size_t i = 0; i < cd.num_instances(); ++i) {
    for (std::size_t u = 0; u < cd.num_units(); ++u) {
      const auto s = cd.partner(i, u);
      if (is_private[s]) flag(s, "instance " + std::to_string(i) + " pairs unit " + std::to_string(u) +
                                     " with privacy label " + std::to_string(s) + " as partner");
    }
  }
  if (cd.num_observed() + 2 * cd.num_units() != cd.num_labels()) {
    report.passed = false;
    report.violations.push_back("c + 2m = " + std::to_string(cd.num_observed() + 2 * cd.num_units()) +
                                " does not equal L = " + std::to_string(cd.num_labels()));
  }
  std::ranges::sort(report.leaked_indices);
  return report;
}

}  // namespace clplu
