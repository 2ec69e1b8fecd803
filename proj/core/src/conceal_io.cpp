#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "clplu/conceal.hpp"
#include "clplu/error.hpp"
#include "sparse_ml.hpp"
#include "text.hpp"

namespace clplu {

using nlohmann::json;

std::string scheme_to_json(const PluScheme& scheme) {
  nlohmann::ordered_json j;
  j["L"] = scheme.num_labels();
  j["mode"] = std::string(to_string(scheme.mode()));
  j["seed"] = scheme.seed();
  j["units"] = nlohmann::ordered_json::array();
  for (const auto& u : scheme.units()) {
    nlohmann::ordered_json unit;
    unit["s"] = u.partner;
    unit["p"] = u.privacy;
    j["units"].push_back(std::move(unit));
  }
  return j.dump(2);
}

PluScheme scheme_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    std::vector<PluUnit> units;
    for (const auto& u : j.at("units")) units.push_back({u.at("s").get<std::size_t>(), u.at("p").get<std::size_t>()});
    return PluScheme(j.at("L").get<std::size_t>(), std::move(units),
                     parse_pairing_mode(j.at("mode").get<std::string>()), j.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scheme JSON: ") + e.what());
  }
}

void write_concealed(const ConcealedDataset& cd, std::ostream& out) {
  const auto& scheme = cd.scheme();
  const auto m = cd.num_units();
  out << detail::format_sparse_header({cd.num_instances(), cd.num_features(), cd.num_labels()}) << '\n';
  out << "#plu m=" << m << " mode=" << to_string(scheme.mode()) << " seed=" << scheme.seed() << '\n';
  for (std::size_t u = 0; u < m; ++u) {
    out << "#unit " << u << " s=" << scheme.units()[u].partner << " p=" << scheme.units()[u].privacy << '\n';
  }
  const bool per_instance = scheme.mode() == PairingMode::PerInstance;
  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < cd.num_instances(); ++i) {
    positives.clear();
    for (std::size_t k = 0; k < cd.num_observed(); ++k) {
      if (cd.observed_labels()(i, k)) positives.push_back(cd.observed_index()[k]);
    }
    for (std::size_t u = 0; u < m; ++u) {
      if (cd.plu_values()(i, u)) positives.push_back(cd.partner(i, u));
    }
    std::ranges::sort(positives);
    detail::write_sparse_line(out, positives, cd.features().row(i));
    if (per_instance) {
      out << '|';
      for (std::size_t u = 0; u < m; ++u) out << (u ? "," : "") << cd.partner(i, u);
    }
    out << '\n';
  }
}

ConcealedDataset read_concealed(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<detail::SparseHeader> header;
  std::optional<std::size_t> m;
  PairingMode mode = PairingMode::DatasetFixed;
  std::uint64_t seed = 0;
  std::vector<std::optional<PluUnit>> units;
  std::optional<PluScheme> scheme;
  std::vector<std::size_t> observed;
  std::vector<int> observed_col;  // label -> observed column, or -1
  RealMatrix x;
  BinaryMatrix y, v;
  IndexMatrix partners;
  std::size_t row = 0;

  auto finish_header = [&]() {
    if (!m) throw ParseError(source, line_no, "missing '#plu' header line");
    std::vector<PluUnit> resolved;
    for (std::size_t u = 0; u < *m; ++u) {
      if (!units[u]) throw ParseError(source, line_no, "missing '#unit " + std::to_string(u) + "' line");
      resolved.push_back(*units[u]);
    }
    try {
      scheme.emplace(header->L, std::move(resolved), mode, seed);
    } catch (const ConfigError& e) {
      throw ParseError(source, line_no, e.what());
    }
    observed = scheme->observed_indices();
    observed_col.assign(header->L, -1);
    for (std::size_t k = 0; k < observed.size(); ++k) observed_col[observed[k]] = static_cast<int>(k);
    x = RealMatrix(header->n, header->d);
    y = BinaryMatrix(header->n, observed.size());
    v = BinaryMatrix(header->n, *m);
    partners = IndexMatrix(header->n, *m);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (!header) {
      header = detail::parse_sparse_header(t, source, line_no);
      continue;
    }
    if (t.starts_with('#')) {
      if (scheme) throw ParseError(source, line_no, "header line after data");
      const auto toks = detail::tokenize(t);
      if (toks[0] == "#plu") {
        for (std::size_t k = 1; k < toks.size(); ++k) {
          const auto eq = toks[k].find('=');
          const auto key = toks[k].substr(0, eq);
          const auto val = eq == std::string_view::npos ? std::string_view{} : toks[k].substr(eq + 1);
          if (key == "m") {
            m = detail::parse_size(val);
            if (!m) throw ParseError(source, line_no, "bad unit count");
            units.assign(*m, std::nullopt);
          } else if (key == "mode") {
            try {
              mode = parse_pairing_mode(val);
            } catch (const ConfigError& e) {
              throw ParseError(source, line_no, e.what());
            }
          } else if (key == "seed") {
            const auto s = detail::parse_u64(val);
            if (!s) throw ParseError(source, line_no, "bad seed");
            seed = *s;
          } else {
            throw ParseError(source, line_no, "unknown #plu key '" + std::string(key) + "'");
          }
        }
      } else if (toks[0] == "#unit") {
        if (!m) throw ParseError(source, line_no, "'#unit' before '#plu'");
        if (toks.size() != 4 || !toks[2].starts_with("s=") || !toks[3].starts_with("p=")) {
          throw ParseError(source, line_no, "expected '#unit <u> s=<s> p=<p>'");
        }
        const auto u = detail::parse_size(toks[1]);
        const auto s = detail::parse_size(toks[2].substr(2));
        const auto p = detail::parse_size(toks[3].substr(2));
        if (!u || !s || !p || *u >= *m) throw ParseError(source, line_no, "malformed '#unit' line");
        units[*u] = PluUnit{*s, *p};
      }
      continue;
    }
    if (!scheme) finish_header();
    if (row >= header->n) throw ParseError(source, line_no, "more instances than header n=" + std::to_string(header->n));

    const auto parsed = detail::parse_sparse_line(t, *header, source, line_no);
    const auto& sch = *scheme;
    if (sch.mode() == PairingMode::PerInstance) {
      if (!parsed.extra) throw ParseError(source, line_no, "per_instance line lacks its partner list");
      const auto list = detail::parse_index_list(*parsed.extra, header->L, "partner index", source, line_no);
      if (list.size() != *m) throw ParseError(source, line_no, "partner list must have m entries");
      auto pool = sch.partner_indices();
      auto sorted = list;
      std::ranges::sort(pool);
      std::ranges::sort(sorted);
      if (pool != sorted) throw ParseError(source, line_no, "partner list is not a permutation of the unit partners");
      std::ranges::copy(list, partners.row(row).begin());
    } else {
      if (parsed.extra) throw ParseError(source, line_no, "partner list given in dataset_fixed mode");
      for (std::size_t u = 0; u < *m; ++u) partners(row, u) = sch.units()[u].partner;
    }
    for (const auto j : parsed.labels) {
      if (observed_col[j] >= 0) {
        y(row, static_cast<std::size_t>(observed_col[j])) = 1;
        continue;
      }
      bool matched = false;
      for (std::size_t u = 0; u < *m; ++u) {
        if (partners(row, u) == j) {
          v(row, u) = 1;
          matched = true;
        }
      }
      if (!matched) {
        throw ParseError(source, line_no, "label " + std::to_string(j) + " is a concealed index and may not appear");
      }
    }
    for (const auto& [k, val] : parsed.features) x(row, k) = val;
    ++row;
  }
  if (in.bad()) throw DataError(source + ": read failure");
  if (!header) throw ParseError(source, line_no, "missing header '#n=<n> d=<d> L=<L>'");
  if (!scheme) finish_header();
  if (row != header->n) {
    throw ParseError(source, line_no,
                     "header declares n=" + std::to_string(header->n) + " but file has " + std::to_string(row) + " instances");
  }
  return ConcealedDataset(std::make_shared<const RealMatrix>(std::move(x)), *scheme, std::move(observed), std::move(y),
                          std::move(v), std::move(partners));
}

void write_truth(const SealedTruth& truth, std::ostream& out) {
  out << "#truth n=" << truth.num_instances() << " m=" << truth.num_units() << '\n';
  for (std::size_t i = 0; i < truth.num_instances(); ++i) {
    for (std::size_t u = 0; u < truth.num_units(); ++u) {
      if (u) out << ' ';
      out << int{truth.partner_truth(i, u)} << int{truth.privacy_truth(i, u)};
    }
    out << '\n';
  }
}

SealedTruth read_truth(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n, m;
  std::vector<std::uint8_t> cells;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (!n) {
      if (t.empty()) continue;
      const auto toks = detail::tokenize(t);
      if (toks.size() != 3 || toks[0] != "#truth" || !toks[1].starts_with("n=") || !toks[2].starts_with("m=")) {
        throw ParseError(source, line_no, "expected '#truth n=<n> m=<m>'");
      }
      n = detail::parse_size(toks[1].substr(2));
      m = detail::parse_size(toks[2].substr(2));
      if (!n || !m) throw ParseError(source, line_no, "bad truth header values");
      continue;
    }
    const auto toks = detail::tokenize(t);
    if (toks.size() != *m) {
      throw ParseError(source, line_no, "expected " + std::to_string(*m) + " unit pairs, got " + std::to_string(toks.size()));
    }
    for (const auto tok : toks) {
      if (tok.size() != 2 || (tok[0] != '0' && tok[0] != '1') || (tok[1] != '0' && tok[1] != '1')) {
        throw ParseError(source, line_no, "unit pair '" + std::string(tok) + "' is not two binary digits");
      }
      cells.push_back(static_cast<std::uint8_t>(tok[0] - '0'));
      cells.push_back(static_cast<std::uint8_t>(tok[1] - '0'));
    }
    ++rows;
  }
  if (!n) throw ParseError(source, line_no, "missing '#truth' header");
  if (rows != *n) throw ParseError(source, line_no, "truth header declares n=" + std::to_string(*n) +
                                                        " but file has " + std::to_string(rows) + " rows");
  return SealedTruth(BinaryMatrix(rows, 2 * *m, std::move(cells)));
}

void save_concealed(const ConcealedDataset& cd, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_concealed(cd, out);
}

ConcealedDataset load_concealed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_concealed(in, path.string());
}

void save_truth(const SealedTruth& truth, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_truth(truth, out);
}

SealedTruth load_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_truth(in, path.string());
}

}  // namespace clplu
