#include "clplu/convert.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "clplu/error.hpp"
#include "text.hpp"

namespace clplu {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string unquote(std::string_view s) {
  s = detail::trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return std::string(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

struct ArffAttribute {
  std::string name;
  bool nominal = false;
};

// "@attribute <name> <type>"; the name may be quoted and contain blanks.
ArffAttribute parse_attribute(std::string_view body, const std::string& source, std::size_t line_no) {
  body = detail::trim(body);
  std::size_t name_end = 0;
  if (!body.empty() && (body[0] == '\'' || body[0] == '"')) {
    const auto close = body.find(body[0], 1);
    if (close == std::string_view::npos) throw ParseError(source, line_no, "unterminated attribute name");
    name_end = close + 1;
  } else {
    name_end = body.find_first_of(" \t");
    if (name_end == std::string_view::npos) throw ParseError(source, line_no, "attribute without type");
  }
  ArffAttribute attr;
  attr.name = unquote(body.substr(0, name_end));
  const auto type = detail::trim(body.substr(name_end));
  if (type.starts_with('{')) {
    attr.nominal = true;
  } else {
    const auto t = lower(type);
    if (t != "numeric" && t != "real" && t != "integer") {
      throw ParseError(source, line_no, "unsupported attribute type '" + std::string(type) + "'");
    }
  }
  return attr;
}

}  // namespace

MultiLabelDataset read_arff(std::istream& in, const ArffOptions& options, const std::string& source) {
  if (options.num_labels < 2) throw ConfigError("ARFF conversion needs num_labels >= 2");
  std::vector<ArffAttribute> attrs;
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;
  std::size_t num_attrs = 0, L = options.num_labels, d = 0;
  std::vector<double> xs;
  std::vector<std::uint8_t> ys;
  std::size_t rows = 0;
  std::vector<double> values;

  auto is_label = [&](std::size_t a) { return options.labels_first ? a < L : a >= d; };
  auto label_slot = [&](std::size_t a) { return options.labels_first ? a : a - d; };
  auto feature_slot = [&](std::size_t a) { return options.labels_first ? a - L : a; };

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.starts_with('%')) continue;
    if (!in_data) {
      const auto head = lower(t.substr(0, std::min<std::size_t>(t.size(), 10)));
      if (head.starts_with("@relation")) continue;
      if (head.starts_with("@attribute")) {
        attrs.push_back(parse_attribute(t.substr(10), source, line_no));
        continue;
      }
      if (head.starts_with("@data")) {
        num_attrs = attrs.size();
        if (num_attrs <= L) throw ParseError(source, line_no, "ARFF has no feature attributes besides the labels");
        d = num_attrs - L;
        for (std::size_t a = 0; a < num_attrs; ++a) {
          if (!is_label(a) && attrs[a].nominal) {
            throw ParseError(source, line_no, "feature attribute '" + attrs[a].name + "' is nominal");
          }
        }
        in_data = true;
        continue;
      }
      throw ParseError(source, line_no, "unexpected line in ARFF header");
    }

    values.assign(num_attrs, 0.0);
    if (t.starts_with('{')) {
      if (!t.ends_with('}')) throw ParseError(source, line_no, "unterminated sparse row");
      for (const auto entry : detail::split(t.substr(1, t.size() - 2), ',')) {
        const auto toks = detail::tokenize(entry);
        if (toks.empty()) continue;
        if (toks.size() != 2) throw ParseError(source, line_no, "sparse entry must be '<index> <value>'");
        const auto idx = detail::parse_size(toks[0]);
        const auto val = detail::parse_double(toks[1]);
        if (!idx || *idx >= num_attrs) throw ParseError(source, line_no, "bad sparse index '" + std::string(toks[0]) + "'");
        if (!val) throw ParseError(source, line_no, "bad sparse value '" + std::string(toks[1]) + "'");
        values[*idx] = *val;
      }
    } else {
      const auto cells = detail::split(t, ',');
      if (cells.size() != num_attrs) {
        throw ParseError(source, line_no,
                         "expected " + std::to_string(num_attrs) + " values, got " + std::to_string(cells.size()));
      }
      for (std::size_t a = 0; a < num_attrs; ++a) {
        const auto cell = unquote(cells[a]);
        const auto val = detail::parse_double(cell);
        if (!val) throw ParseError(source, line_no, "bad value '" + cell + "' (missing values are not supported)");
        values[a] = *val;
      }
    }
    const auto y_base = ys.size();
    const auto x_base = xs.size();
    ys.resize(y_base + L, 0);
    xs.resize(x_base + d, 0.0);
    for (std::size_t a = 0; a < num_attrs; ++a) {
      if (is_label(a)) {
        if (values[a] != 0.0 && values[a] != 1.0) {
          throw ParseError(source, line_no, "label attribute '" + attrs[a].name + "' is not 0/1");
        }
        ys[y_base + label_slot(a)] = values[a] == 1.0 ? 1 : 0;
      } else {
        if (!std::isfinite(values[a])) throw ParseError(source, line_no, "non-finite feature value");
        xs[x_base + feature_slot(a)] = values[a];
      }
    }
    ++rows;
  }
  if (!in_data) throw ParseError(source, line_no, "missing @data section");

  std::vector<std::string> names;
  for (std::size_t a = 0; a < num_attrs; ++a) {
    if (is_label(a)) names.push_back(attrs[a].name);
  }
  try {
    return MultiLabelDataset(RealMatrix(rows, d, std::move(xs)), BinaryMatrix(rows, L, std::move(ys)), std::move(names));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

MultiLabelDataset read_libsvm_multilabel(std::istream& in, const LibsvmOptions& options, const std::string& source) {
  struct Row {
    std::vector<std::size_t> labels;
    std::vector<std::pair<std::size_t, double>> features;
  };
  std::vector<Row> rows;
  std::size_t max_label = 0, max_feature = 0;
  bool any_label = false, any_feature = false;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.starts_with('#')) continue;
    const auto toks = detail::tokenize(t);
    Row row;
    std::size_t first_feature = 0;
    if (!toks.empty() && toks[0].find(':') == std::string_view::npos) {
      first_feature = 1;
      for (const auto part : detail::split(toks[0], ',')) {
        const auto idx = detail::parse_size(part);
        if (!idx) throw ParseError(source, line_no, "bad label '" + std::string(part) + "'");
        row.labels.push_back(*idx);
        max_label = std::max(max_label, *idx);
        any_label = true;
      }
    }
    for (std::size_t k = first_feature; k < toks.size(); ++k) {
      const auto colon = toks[k].find(':');
      if (colon == std::string_view::npos) throw ParseError(source, line_no, "feature without ':'");
      auto idx = detail::parse_size(toks[k].substr(0, colon));
      const auto val = detail::parse_double(toks[k].substr(colon + 1));
      if (!idx || !val) throw ParseError(source, line_no, "malformed feature '" + std::string(toks[k]) + "'");
      if (options.one_based_features) {
        if (*idx == 0) throw ParseError(source, line_no, "feature index 0 in one-based input");
        *idx -= 1;
      }
      if (!std::isfinite(*val)) throw ParseError(source, line_no, "non-finite feature value");
      row.features.emplace_back(*idx, *val);
      max_feature = std::max(max_feature, *idx);
      any_feature = true;
    }
    rows.push_back(std::move(row));
  }

  const auto L = options.num_labels ? options.num_labels : (any_label ? max_label + 1 : 0);
  const auto d = options.num_features ? options.num_features : (any_feature ? max_feature + 1 : 0);
  if (any_label && max_label >= L) throw DataError(source + ": label index exceeds num_labels");
  if (any_feature && max_feature >= d) throw DataError(source + ": feature index exceeds num_features");

  RealMatrix x(rows.size(), d);
  BinaryMatrix y(rows.size(), L);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto j : rows[i].labels) y(i, j) = 1;
    for (const auto& [k, v] : rows[i].features) x(i, k) = v;
  }
  try {
    return MultiLabelDataset(std::move(x), std::move(y));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

}  // namespace clplu
