#include "clplu/model.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "clplu/error.hpp"
#include "clplu/rng.hpp"

namespace clplu {

using nlohmann::json;

LinearModel::LinearModel(std::size_t num_features, std::size_t num_labels)
    : weights_(num_labels, num_features, 0.0), bias_(num_labels, 0.0) {}

LinearModel::LinearModel(RealMatrix weights, std::vector<double> bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
  if (bias_.size() != weights_.rows()) throw DataError("bias length must equal the number of labels");
  for (const auto v : weights_.values()) {
    if (!std::isfinite(v)) throw DataError("model weights must be finite");
  }
  for (const auto v : bias_) {
    if (!std::isfinite(v)) throw DataError("model bias must be finite");
  }
}

LinearModel init_model(std::size_t num_features, std::size_t num_labels, std::uint64_t seed) {
  if (num_features < 1 || num_labels < 1) throw ConfigError("model needs d >= 1 and L >= 1");
  LinearModel model(num_features, num_labels);
  const double bound = 1.0 / std::sqrt(static_cast<double>(num_features));
  Rng rng(seed);
  for (auto& w : model.weights().values()) w = rng.uniform(-bound, bound);
  return model;
}

namespace {

void check_input(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.num_features()) {
    throw DataError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                    std::to_string(model.num_features()));
  }
  for (const auto v : x) {
    if (!std::isfinite(v)) throw DataError("feature vector contains a non-finite value");
  }
}

}  // namespace

std::vector<double> predict_logits(const LinearModel& model, std::span<const double> x) {
  check_input(model, x);
  std::vector<double> out(model.num_labels());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto w = model.weights().row(j);
    double s = model.bias()[j];
    for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * x[k];
    out[j] = s;
  }
  return out;
}

std::vector<double> predict_probs(const LinearModel& model, std::span<const double> x) {
  auto out = predict_logits(model, x);
  for (auto& v : out) v = sigmoid(v);
  return out;
}

RealMatrix batch_logits(const LinearModel& model, const RealMatrix& features, std::span<const std::size_t> rows) {
  if (features.cols() != model.num_features()) throw DataError("feature dimension does not match the model");
  const auto L = model.num_labels();
  const auto d = model.num_features();
  RealMatrix out(rows.size(), L);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto x = features.row(rows[r]);
    for (std::size_t j = 0; j < L; ++j) {
      const auto w = model.weights().row(j);
      double s = model.bias()[j];
      for (std::size_t k = 0; k < d; ++k) s += w[k] * x[k];
      out(r, j) = s;
    }
  }
  return out;
}

RealMatrix predict_probs(const LinearModel& model, const RealMatrix& features) {
  std::vector<std::size_t> rows(features.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto out = batch_logits(model, features, rows);
  for (auto& v : out.values()) v = sigmoid(v);
  return out;
}

std::vector<std::uint8_t> predict_labels(std::span<const double> probs, double threshold) {
  std::vector<std::uint8_t> out(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) out[j] = probs[j] >= threshold ? 1 : 0;
  return out;
}

BinaryMatrix predict_labels(const RealMatrix& probs, double threshold) {
  BinaryMatrix out(probs.rows(), probs.cols());
  for (std::size_t k = 0; k < probs.size(); ++k) out.values()[k] = probs.values()[k] >= threshold ? 1 : 0;
  return out;
}

std::string checkpoint_to_json(const LinearModel& model, const CheckpointMeta& meta) {
  const nlohmann::ordered_json j = {{"d", model.num_features()},
                  {"L", model.num_labels()},
                  {"W", std::vector<double>(model.weights().values().begin(), model.weights().values().end())},
                  {"b", model.bias()},
                  {"metadata", {{"seed", meta.seed}, {"loss_mode", meta.loss_mode}, {"epoch", meta.epoch}}}};
  return j.dump();
}

Checkpoint checkpoint_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    const auto d = j.at("d").get<std::size_t>();
    const auto L = j.at("L").get<std::size_t>();
    auto w = j.at("W").get<std::vector<double>>();
    auto b = j.at("b").get<std::vector<double>>();
    if (w.size() != d * L) throw DataError("checkpoint W has " + std::to_string(w.size()) + " entries, expected d*L");
    Checkpoint cp{LinearModel(RealMatrix(L, d, std::move(w)), std::move(b)), {}};
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      cp.meta.seed = m.value("seed", std::uint64_t{0});
      cp.meta.loss_mode = m.value("loss_mode", std::string{});
      cp.meta.epoch = m.value("epoch", std::size_t{0});
    }
    return cp;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint JSON: ") + e.what());
  }
}

void save_checkpoint(const LinearModel& model, const CheckpointMeta& meta, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << checkpoint_to_json(model, meta) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace clplu
