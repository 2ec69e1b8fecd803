#include "clplu/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "clplu/error.hpp"

namespace clplu::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct Value {
  std::string text;
  std::size_t line;
};

class Reader {
 public:
  Reader(std::map<std::string, Value> values, std::string source)
      : values_(std::move(values)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string string(const std::string& key) {
    auto v = take(key);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
  }

  double real(const std::string& key) { return to_real(key, take(key)); }
  std::uint64_t u64(const std::string& key) { return to_u64(key, take(key)); }

  bool boolean(const std::string& key) {
    const auto v = take(key);
    if (v == "true") return true;
    if (v == "false") return false;
    fail(key, "expected true or false");
  }

  std::vector<std::string> array(const std::string& key) {
    const auto v = take(key);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') fail(key, "expected [..]");
    std::vector<std::string> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto t = std::string(trim(item));
      if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
      if (t.empty()) fail(key, "empty array element");
      out.push_back(std::move(t));
    }
    return out;
  }

  std::vector<std::uint64_t> u64_array(const std::string& key) {
    std::vector<std::uint64_t> out;
    for (const auto& s : array(key)) out.push_back(to_u64(key, s));
    return out;
  }

  std::vector<double> real_array(const std::string& key) {
    std::vector<double> out;
    for (const auto& s : array(key)) out.push_back(to_real(key, s));
    return out;
  }

  void finish() const {
    if (!values_.empty()) {
      const auto& [key, v] = *values_.begin();
      throw ParseError(source_, v.line, "unknown key '" + key + "'");
    }
  }

 private:
  std::string take(const std::string& key) {
    auto it = values_.find(key);
    current_line_ = it->second.line;
    auto text = std::move(it->second.text);
    values_.erase(it);
    return text;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ParseError(source_, current_line_, key + ": " + what);
  }

  double to_real(const std::string& key, const std::string& s) const {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail(key, "expected a number, got '" + s + "'");
    return v;
  }

  std::uint64_t to_u64(const std::string& key, const std::string& s) const {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail(key, "expected an unsigned integer, got '" + s + "'");
    return v;
  }

  std::map<std::string, Value> values_;
  std::string source_;
  std::size_t current_line_ = 0;
};

TieOrder parse_tie_order(const std::string& s) {
  if (s.size() != 3) throw ConfigError("tie_order must be a permutation of \"abc\"");
  TieOrder order{};
  for (std::size_t k = 0; k < 3; ++k) {
    switch (s[k]) {
      case 'a': order[k] = Scenario::A; break;
      case 'b': order[k] = Scenario::B; break;
      case 'c': order[k] = Scenario::C; break;
      default: throw ConfigError("tie_order must be a permutation of \"abc\"");
    }
  }
  auto sorted = s;
  std::ranges::sort(sorted);
  if (sorted != "abc") throw ConfigError("tie_order must be a permutation of \"abc\"");
  return order;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

std::vector<TrainConfig> ExperimentConfig::grid_configs(LossMode mode) const {
  std::vector<TrainConfig> out;
  for (const auto bs : grid.batch_sizes) {
    for (const auto lr : grid.lrs) {
      for (const auto wd : grid.weight_decays) {
        auto cfg = train;
        cfg.batch_size = bs;
        cfg.lr = lr;
        cfg.weight_decay = wd;
        cfg.loss_mode = mode;
        out.push_back(cfg);
      }
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (dataset.empty()) throw ConfigError("dataset path is required");
  split.validate();
  if (grid.size() == 0) throw ConfigError("training grid is empty");
  if (num_units() < 1) throw ConfigError("at least one privacy-label unit is required");
  for (const auto& cfg : grid_configs(LossMode::Plul)) cfg.validate();
}

void ExperimentConfig::validate_for(std::size_t num_labels) const {
  const auto m = num_units();
  if (m < 1 || 2 * m > num_labels) {
    throw ConfigError("unit count m=" + std::to_string(m) + " violates 1 <= m and 2m <= L (L=" +
                      std::to_string(num_labels) + ")");
  }
  for (const auto p : privacy_indices) {
    if (p >= num_labels) throw ConfigError("privacy index " + std::to_string(p) + " out of range");
  }
}

void ExperimentConfig::set_seed(std::uint64_t seed) {
  split.seed = seed;
  privacy_seed = seed;
  pairing_seed = seed;
  train.seed = seed;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const std::string& source) {
  std::map<std::string, Value> values;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string_view::npos) {
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ParseError(source, line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key = value");
    const auto key_part = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key_part.empty() || value.empty()) throw ParseError(source, line_no, "expected key = value");
    auto key = section.empty() ? std::string(key_part) : section + "." + std::string(key_part);
    if (values.count(key)) throw ParseError(source, line_no, "duplicate key '" + key + "'");
    values.emplace(std::move(key), Value{std::string(value), line_no});
  }

  Reader r(std::move(values), source);
  ExperimentConfig cfg;
  try {
    if (r.has("seed")) cfg.set_seed(r.u64("seed"));
    if (r.has("dataset")) cfg.dataset = resolve(r.string("dataset"), base_dir);
    if (r.has("format")) cfg.format = parse_data_format(r.string("format"));
    if (r.has("output_dir")) cfg.output_dir = resolve(r.string("output_dir"), base_dir);

    if (r.has("split.train")) cfg.split.train_frac = r.real("split.train");
    if (r.has("split.val")) cfg.split.val_frac = r.real("split.val");
    if (r.has("split.test")) cfg.split.test_frac = r.real("split.test");
    if (r.has("split.seed")) cfg.split.seed = r.u64("split.seed");

    if (r.has("privacy.indices")) {
      for (const auto v : r.u64_array("privacy.indices")) cfg.privacy_indices.push_back(v);
    }
    if (r.has("privacy.count")) cfg.privacy_count = r.u64("privacy.count");
    if (r.has("privacy.seed")) cfg.privacy_seed = r.u64("privacy.seed");

    if (r.has("pairing.mode")) cfg.pairing = parse_pairing_mode(r.string("pairing.mode"));
    if (r.has("pairing.seed")) cfg.pairing_seed = r.u64("pairing.seed");

    if (r.has("train.epochs")) cfg.train.epochs = r.u64("train.epochs");
    if (r.has("train.batch_sizes")) {
      cfg.grid.batch_sizes.clear();
      for (const auto v : r.u64_array("train.batch_sizes")) cfg.grid.batch_sizes.push_back(v);
    }
    if (r.has("train.lrs")) cfg.grid.lrs = r.real_array("train.lrs");
    if (r.has("train.weight_decays")) cfg.grid.weight_decays = r.real_array("train.weight_decays");
    if (r.has("train.lr_decay_epochs")) {
      cfg.train.lr_decay_epochs.clear();
      for (const auto v : r.u64_array("train.lr_decay_epochs")) cfg.train.lr_decay_epochs.push_back(v);
    }
    if (r.has("train.lr_decay_factor")) cfg.train.lr_decay_factor = r.real("train.lr_decay_factor");
    if (r.has("train.seed")) cfg.train.seed = r.u64("train.seed");
    if (r.has("train.threshold")) cfg.train.threshold = r.real("train.threshold");
    if (r.has("train.bias")) cfg.train.use_bias = r.boolean("train.bias");
    if (r.has("train.minmax")) cfg.minmax = r.boolean("train.minmax");
    if (r.has("train.tie_order")) cfg.train.tie_order = parse_tie_order(r.string("train.tie_order"));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path(), path.string());
}

std::vector<std::size_t> parse_count_list(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || p != item.data() + item.size()) {
      throw ConfigError("bad count list '" + std::string(text) + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace clplu::harness
