#pragma once

// Privacy-Label Units.
//
// A unit pairs one privacy label p with one non-privacy partner label s and
// is annotated with the single bit z_s OR z_p. Privacy labels never get a
// training-visible value of their own, and neither do partners: the unit bit
// takes the partner's slot. The remaining c = L - 2m labels are observed as
// usual.
//
// Training code sees a ConcealedDataset. The hidden ground truth of every
// unit member lives in a separate SealedTruth object that only evaluation
// code accepts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clplu/dataset.hpp"
#include "clplu/matrix.hpp"

namespace clplu {

enum class PairingMode {
  /// One partner per privacy label, shared by every instance.
  DatasetFixed,
  /// The partner set is fixed, but each instance draws its own assignment of
  /// partners to privacy labels (a seeded permutation), recorded per instance.
  PerInstance,
};

PairingMode parse_pairing_mode(std::string_view name);
std::string_view to_string(PairingMode mode);

struct PluUnit {
  std::size_t partner;  ///< s: the non-privacy label
  std::size_t privacy;  ///< p: the concealed label

  bool operator==(const PluUnit&) const = default;
};

class PluScheme {
 public:
  /// Validates disjointness, index bounds and 2m <= L. m = 0 is allowed and
  /// describes a fully observed dataset.
  PluScheme(std::size_t num_labels, std::vector<PluUnit> units, PairingMode mode = PairingMode::DatasetFixed,
            std::uint64_t seed = 0);

  std::size_t num_labels() const noexcept { return num_labels_; }
  std::size_t num_units() const noexcept { return units_.size(); }
  std::size_t num_observed() const noexcept { return num_labels_ - 2 * units_.size(); }
  const std::vector<PluUnit>& units() const noexcept { return units_; }
  PairingMode mode() const noexcept { return mode_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<std::size_t> privacy_indices() const;
  std::vector<std::size_t> partner_indices() const;
  /// Labels outside every unit, ascending.
  std::vector<std::size_t> observed_indices() const;

  bool operator==(const PluScheme&) const = default;

 private:
  std::size_t num_labels_;
  std::vector<PluUnit> units_;
  PairingMode mode_;
  std::uint64_t seed_;
};

/// Pairs every privacy label with a partner sampled uniformly, without
/// replacement, from the non-privacy labels.
PluScheme build_scheme(std::size_t num_labels, std::span<const std::size_t> privacy_indices,
                       PairingMode mode = PairingMode::DatasetFixed, std::uint64_t seed = 0);

/// `count` distinct label indices sampled uniformly; returned ascending.
std::vector<std::size_t> sample_privacy_indices(std::size_t num_labels, std::size_t count, std::uint64_t seed);

/// The unit bit: 0 iff both member labels are 0.
constexpr std::uint8_t plu_truth(std::uint8_t z_s, std::uint8_t z_p) noexcept {
  return (z_s != 0 || z_p != 0) ? 1 : 0;
}

/// Training-visible view of concealed data.
class ConcealedDataset {
 public:
  /// Checks shapes only. Leaks are the business of audit_no_leak().
  /// `partners` is n x m: the partner label used by unit u for instance i.
  ConcealedDataset(std::shared_ptr<const RealMatrix> features, PluScheme scheme,
                   std::vector<std::size_t> observed_index, BinaryMatrix observed_labels, BinaryMatrix plu_values,
                   IndexMatrix partners);

  std::size_t num_instances() const noexcept { return observed_labels_.rows(); }
  std::size_t num_features() const noexcept { return features_->cols(); }
  std::size_t num_labels() const noexcept { return scheme_.num_labels(); }
  std::size_t num_observed() const noexcept { return observed_index_.size(); }
  std::size_t num_units() const noexcept { return scheme_.num_units(); }

  const RealMatrix& features() const noexcept { return *features_; }
  const std::shared_ptr<const RealMatrix>& shared_features() const noexcept { return features_; }
  const PluScheme& scheme() const noexcept { return scheme_; }

  /// Column k of observed_labels() is original label observed_index()[k].
  const std::vector<std::size_t>& observed_index() const noexcept { return observed_index_; }
  const BinaryMatrix& observed_labels() const noexcept { return observed_labels_; }
  /// n x m unit bits.
  const BinaryMatrix& plu_values() const noexcept { return plu_values_; }
  const IndexMatrix& partners() const noexcept { return partners_; }

  std::size_t partner(std::size_t instance, std::size_t unit) const { return partners_(instance, unit); }
  std::size_t privacy(std::size_t unit) const { return scheme_.units()[unit].privacy; }

  /// Rows `indices`, in order. Shares nothing mutable with *this.
  ConcealedDataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const ConcealedDataset& other) const;

 private:
  std::shared_ptr<const RealMatrix> features_;
  PluScheme scheme_;
  std::vector<std::size_t> observed_index_;
  BinaryMatrix observed_labels_;
  BinaryMatrix plu_values_;
  IndexMatrix partners_;
};

/// Hidden ground truth of unit members. Evaluation-only.
class SealedTruth {
 public:
  /// n x 2m; column 2u holds z_s and column 2u+1 holds z_p for unit u.
  explicit SealedTruth(BinaryMatrix hidden);

  std::size_t num_instances() const noexcept { return hidden_.rows(); }
  std::size_t num_units() const noexcept { return hidden_.cols() / 2; }
  std::uint8_t partner_truth(std::size_t i, std::size_t u) const { return hidden_(i, 2 * u); }
  std::uint8_t privacy_truth(std::size_t i, std::size_t u) const { return hidden_(i, 2 * u + 1); }
  const BinaryMatrix& hidden() const noexcept { return hidden_; }

  SealedTruth subset(std::span<const std::size_t> indices) const;

  bool operator==(const SealedTruth&) const = default;

 private:
  BinaryMatrix hidden_;
};

struct ConcealResult {
  ConcealedDataset data;
  SealedTruth truth;
};

ConcealResult conceal(const MultiLabelDataset& ds, const PluScheme& scheme);

/// Full n x L ground truth rebuilt from observed labels plus sealed truth.
BinaryMatrix reconstruct_labels(const ConcealedDataset& cd, const SealedTruth& truth);

struct AuditReport {
  bool passed = true;
  /// Label indices that are exposed individually although they belong to a unit.
  std::vector<std::size_t> leaked_indices;
  std::vector<std::string> violations;
};

/// Checks every training-visible accessor: the observed index map, the
/// per-instance partner table and the label/observed counts.
AuditReport audit_no_leak(const ConcealedDataset& cd);

// --- serialization -------------------------------------------------------

/// {"L":..,"mode":"dataset_fixed","seed":..,"units":[{"s":..,"p":..}]}
std::string scheme_to_json(const PluScheme& scheme);
PluScheme scheme_from_json(std::string_view text);

/// SparseMl with a unit header section:
///   #n=<n> d=<d> L=<L>
///   #plu m=<m> mode=<mode> seed=<seed>
///   #unit <u> s=<s> p=<p>
///   <observed positives and s of every positive unit>|<features>[|<s_0>,<s_1>,...]
/// The trailing partner list appears only in per_instance mode. Privacy
/// indices never appear on a data line.
void write_concealed(const ConcealedDataset& cd, std::ostream& out);
ConcealedDataset read_concealed(std::istream& in, const std::string& source);

///   #truth n=<n> m=<m>
///   <z_s z_p of unit 0> <z_s z_p of unit 1> ...   e.g. "10 00"
void write_truth(const SealedTruth& truth, std::ostream& out);
SealedTruth read_truth(std::istream& in, const std::string& source);

void save_concealed(const ConcealedDataset& cd, const std::filesystem::path& path);
ConcealedDataset load_concealed(const std::filesystem::path& path);
void save_truth(const SealedTruth& truth, const std::filesystem::path& path);
SealedTruth load_truth(const std::filesystem::path& path);

}  // namespace clplu
