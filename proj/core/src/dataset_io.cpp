#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "clplu/dataset.hpp"
#include "clplu/error.hpp"
#include "sparse_ml.hpp"
#include "text.hpp"

namespace clplu {

namespace detail {

bool is_sparse_header(std::string_view line) { return trim(line).starts_with("#n="); }

SparseHeader parse_sparse_header(std::string_view line, const std::string& source, std::size_t line_no) {
  line = trim(line);
  if (!line.starts_with('#')) throw ParseError(source, line_no, "expected header '#n=<n> d=<d> L=<L>'");
  line.remove_prefix(1);
  SparseHeader h;
  bool seen_n = false, seen_d = false, seen_L = false;
  for (const auto tok : tokenize(line)) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "bad header token '" + std::string(tok) + "'");
    const auto key = tok.substr(0, eq);
    const auto value = parse_size(tok.substr(eq + 1));
    if (!value) throw ParseError(source, line_no, "bad header value in '" + std::string(tok) + "'");
    if (key == "n") {
      h.n = *value;
      seen_n = true;
    } else if (key == "d") {
      h.d = *value;
      seen_d = true;
    } else if (key == "L") {
      h.L = *value;
      seen_L = true;
    } else {
      throw ParseError(source, line_no, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!(seen_n && seen_d && seen_L)) throw ParseError(source, line_no, "header must define n, d and L");
  return h;
}

std::string format_sparse_header(const SparseHeader& h) {
  return "#n=" + std::to_string(h.n) + " d=" + std::to_string(h.d) + " L=" + std::to_string(h.L);
}

std::vector<std::size_t> parse_index_list(std::string_view text, std::size_t bound, const std::string& what,
                                          const std::string& source, std::size_t line_no) {
  std::vector<std::size_t> out;
  text = trim(text);
  if (text.empty()) return out;
  for (const auto part : split(text, ',')) {
    const auto idx = parse_size(part);
    if (!idx) throw ParseError(source, line_no, "malformed " + what + " '" + std::string(trim(part)) + "'");
    if (*idx >= bound) {
      throw ParseError(source, line_no,
                       what + " " + std::to_string(*idx) + " out of range (bound " + std::to_string(bound) + ")");
    }
    out.push_back(*idx);
  }
  return out;
}

SparseLine parse_sparse_line(std::string_view line, const SparseHeader& h, const std::string& source,
                             std::size_t line_no) {
  const auto bar = line.find('|');
  if (bar == std::string_view::npos) throw ParseError(source, line_no, "missing '|' separator");
  SparseLine out;
  out.labels = parse_index_list(line.substr(0, bar), h.L, "label index", source, line_no);

  auto rest = line.substr(bar + 1);
  const auto bar2 = rest.find('|');
  if (bar2 != std::string_view::npos) {
    out.extra = rest.substr(bar2 + 1);
    rest = rest.substr(0, bar2);
  }
  for (const auto tok : tokenize(rest)) {
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(source, line_no, "feature '" + std::string(tok) + "' is not <index>:<value>");
    }
    const auto idx = parse_size(tok.substr(0, colon));
    const auto val = parse_double(tok.substr(colon + 1));
    if (!idx || !val) throw ParseError(source, line_no, "malformed feature '" + std::string(tok) + "'");
    if (*idx >= h.d) {
      throw ParseError(source, line_no,
                       "feature index " + std::to_string(*idx) + " out of range (d=" + std::to_string(h.d) + ")");
    }
    if (!std::isfinite(*val)) throw ParseError(source, line_no, "non-finite feature value '" + std::string(tok) + "'");
    out.features.emplace_back(*idx, *val);
  }
  return out;
}

void write_sparse_line(std::ostream& out, std::span<const std::size_t> labels, std::span<const double> features) {
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k) out << ',';
    out << labels[k];
  }
  out << '|';
  bool first = true;
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (features[k] == 0.0) continue;
    if (!first) out << ' ';
    first = false;
    out << k << ':' << format_double(features[k]);
  }
}

}  // namespace detail

DataFormat parse_data_format(std::string_view name) {
  if (name == "sparse_ml" || name == "SPARSE_ML" || name == "sparse") return DataFormat::SparseMl;
  if (name == "dense_csv" || name == "DENSE_CSV" || name == "csv") return DataFormat::DenseCsv;
  throw ConfigError("unknown data format '" + std::string(name) + "' (expected sparse_ml or dense_csv)");
}

std::string_view to_string(DataFormat format) {
  return format == DataFormat::SparseMl ? "sparse_ml" : "dense_csv";
}

namespace {

MultiLabelDataset read_sparse(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<detail::SparseHeader> header;
  std::vector<std::string> names;
  RealMatrix x;
  BinaryMatrix y;
  std::size_t row = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (!header) {
      if (t.empty()) continue;
      header = detail::parse_sparse_header(t, source, line_no);
      x = RealMatrix(header->n, header->d);
      y = BinaryMatrix(header->n, header->L);
      continue;
    }
    if (t.empty()) continue;
    if (t.starts_with('#')) {
      if (t.starts_with("#labels ")) {
        names.clear();
        for (const auto nm : detail::split(t.substr(8), ',')) names.emplace_back(detail::trim(nm));
        if (names.size() != header->L) {
          throw ParseError(source, line_no, "#labels lists " + std::to_string(names.size()) + " names, header says L=" +
                                                std::to_string(header->L));
        }
      }
      continue;
    }
    if (row >= header->n) throw ParseError(source, line_no, "more instances than header n=" + std::to_string(header->n));
    const auto parsed = detail::parse_sparse_line(t, *header, source, line_no);
    if (parsed.extra) throw ParseError(source, line_no, "unexpected second '|' in plain dataset line");
    for (const auto j : parsed.labels) y(row, j) = 1;
    for (const auto& [k, v] : parsed.features) x(row, k) = v;
    ++row;
  }
  if (in.bad()) throw DataError(source + ": read failure");
  if (!header) throw ParseError(source, line_no, "missing header '#n=<n> d=<d> L=<L>'");
  if (row != header->n) {
    throw ParseError(source, line_no,
                     "header declares n=" + std::to_string(header->n) + " but file has " + std::to_string(row) + " instances");
  }
  try {
    return MultiLabelDataset(std::move(x), std::move(y), std::move(names));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

MultiLabelDataset read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t L = 0, d = 0;
  bool have_header = false;
  std::vector<double> xs;
  std::vector<std::uint8_t> ys;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto cells = detail::split(t, ',');
    if (!have_header) {
      bool in_features = false;
      for (const auto raw : cells) {
        const auto c = detail::trim(raw);
        const bool is_label = c.size() > 1 && c[0] == 'y';
        const bool is_feature = c.size() > 1 && c[0] == 'x';
        const auto idx = (is_label || is_feature) ? detail::parse_size(c.substr(1)) : std::nullopt;
        if (!idx) throw ParseError(source, line_no, "bad header column '" + std::string(c) + "'");
        if (is_label) {
          if (in_features || *idx != L) throw ParseError(source, line_no, "label columns must be y0..y{L-1} first");
          ++L;
        } else {
          in_features = true;
          if (*idx != d) throw ParseError(source, line_no, "feature columns must be x0..x{d-1}");
          ++d;
        }
      }
      have_header = true;
      continue;
    }
    if (cells.size() != L + d) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(L + d) + " columns, got " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < L; ++j) {
      const auto v = detail::parse_size(cells[j]);
      if (!v || *v > 1) throw ParseError(source, line_no, "label column y" + std::to_string(j) + " is not 0/1");
      ys.push_back(static_cast<std::uint8_t>(*v));
    }
    for (std::size_t k = 0; k < d; ++k) {
      const auto v = detail::parse_double(cells[L + k]);
      if (!v) throw ParseError(source, line_no, "malformed value in column x" + std::to_string(k));
      if (!std::isfinite(*v)) throw ParseError(source, line_no, "non-finite value in column x" + std::to_string(k));
      xs.push_back(*v);
    }
    ++rows;
  }
  if (in.bad()) throw DataError(source + ": read failure");
  if (!have_header) throw ParseError(source, line_no, "missing header row");
  try {
    return MultiLabelDataset(RealMatrix(rows, d, std::move(xs)), BinaryMatrix(rows, L, std::move(ys)));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

}  // namespace

MultiLabelDataset read_dataset(std::istream& in, DataFormat format, const std::string& source_name) {
  return format == DataFormat::SparseMl ? read_sparse(in, source_name) : read_csv(in, source_name);
}

MultiLabelDataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_dataset(in, format, path.string());
}

void write_dataset(const MultiLabelDataset& ds, std::ostream& out, DataFormat format) {
  const auto n = ds.num_instances();
  const auto d = ds.num_features();
  const auto L = ds.num_labels();
  if (format == DataFormat::SparseMl) {
    out << detail::format_sparse_header({n, d, L}) << '\n';
    if (ds.label_names() != default_label_names(L)) {
      out << "#labels ";
      for (std::size_t j = 0; j < L; ++j) out << (j ? "," : "") << ds.label_names()[j];
      out << '\n';
    }
    std::vector<std::size_t> positives;
    for (std::size_t i = 0; i < n; ++i) {
      positives.clear();
      for (std::size_t j = 0; j < L; ++j) {
        if (ds.labels()(i, j)) positives.push_back(j);
      }
      detail::write_sparse_line(out, positives, ds.features().row(i));
      out << '\n';
    }
  } else {
    for (std::size_t j = 0; j < L; ++j) out << (j ? "," : "") << 'y' << j;
    for (std::size_t k = 0; k < d; ++k) out << ",x" << k;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < L; ++j) out << (j ? "," : "") << int{ds.labels()(i, j)};
      for (std::size_t k = 0; k < d; ++k) out << ',' << detail::format_double(ds.features()(i, k));
      out << '\n';
    }
  }
}

void save_dataset(const MultiLabelDataset& ds, const std::filesystem::path& path, DataFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_dataset(ds, out, format);
  if (!out) throw DataError("write failure on " + path.string());
}

}  // namespace clplu
