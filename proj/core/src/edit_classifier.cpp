#include "qecomb/edit_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "qecomb/errors.hpp"

namespace qecomb {

namespace {

using nlohmann::json;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

void EditClassifierConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
  if (!(prob_floor > 0.0 && prob_floor < 0.5)) {
    throw std::invalid_argument("probability floor must lie in (0, 0.5)");
  }
}

std::vector<LabeledEdit> label_union(const EditUnion& edit_union,
                                     std::span<const Edit> gold) {
  const std::set<Edit> g(gold.begin(), gold.end());
  std::vector<LabeledEdit> out;
  out.reserve(edit_union.size());
  for (const auto& e : edit_union.edits) out.push_back({e, g.contains(e)});
  return out;
}

EditClassifier::EditClassifier(std::vector<std::string> roster)
    : roster_(std::move(roster)) {
  weights_.assign(num_features(), 0.0);
}

std::vector<double> EditClassifier::features(const Edit& edit) const {
  std::vector<double> x(num_features(), 0.0);
  x[static_cast<std::size_t>(edit.type.index())] = 1.0;
  for (std::size_t s = 0; s < roster_.size(); ++s) {
    if (edit.proposers.contains(roster_[s])) x[kNumEditTypes + s] = 1.0;
  }
  x.back() = 1.0;
  return x;
}

double EditClassifier::predict(const Edit& edit) const {
  const auto x = features(edit);
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += weights_[i] * x[i];
  return std::clamp(sigmoid(z), config_.prob_floor, 1.0 - config_.prob_floor);
}

void EditClassifier::annotate(EditUnion& edit_union,
                              std::span<const std::string> systems) const {
  if (!std::equal(systems.begin(), systems.end(), roster_.begin(), roster_.end())) {
    std::string got, want;
    for (const auto& s : systems) got += (got.empty() ? "" : ",") + s;
    for (const auto& s : roster_) want += (want.empty() ? "" : ",") + s;
    throw RosterMismatch("edit classifier trained on [" + want + "], got [" + got + "]");
  }
  std::vector<double> p;
  p.reserve(edit_union.size());
  for (const auto& e : edit_union.edits) p.push_back(predict(e));
  edit_union.p_es = std::move(p);
}

void EditClassifier::set_weights(std::vector<double> weights) {
  if (weights.size() != num_features()) {
    throw ShapeMismatch("edit classifier expects " + std::to_string(num_features()) + " weights");
  }
  weights_ = std::move(weights);
}

void EditClassifier::save_file(const std::string& path) const {
  std::vector<std::string> type_names;
  for (int op = 0; op < 3; ++op) {
    for (int cls = 0; cls < 3; ++cls) {
      type_names.push_back(EditType{static_cast<EditOp>(op), static_cast<EditClass>(cls)}.label());
    }
  }
  json j;
  j["format"] = "qecomb-edit-classifier";
  j["version"] = kFormatVersion;
  j["edit_types"] = type_names;
  j["roster"] = roster_;
  j["weights"] = weights_;
  j["config"] = {{"learning_rate", config_.learning_rate},
                 {"epochs", config_.epochs},
                 {"l2", config_.l2},
                 {"prob_floor", config_.prob_floor}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

EditClassifier EditClassifier::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(0, path + ": " + e.what());
  }
  if (j.value("format", "") != "qecomb-edit-classifier") {
    throw SchemaMismatch(path + " is not an edit classifier artifact");
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw SchemaMismatch(path + ": unsupported edit classifier version");
  }
  if (j.at("edit_types").size() != static_cast<std::size_t>(kNumEditTypes)) {
    throw SchemaMismatch(path + ": edit type inventory differs from this build");
  }
  EditClassifier model(j.at("roster").get<std::vector<std::string>>());
  model.set_weights(j.at("weights").get<std::vector<double>>());
  const auto& c = j.at("config");
  model.config_.learning_rate = c.at("learning_rate").get<double>();
  model.config_.epochs = c.at("epochs").get<int>();
  model.config_.l2 = c.at("l2").get<double>();
  model.config_.prob_floor = c.at("prob_floor").get<double>();
  return model;
}

double edit_classifier_loss(const EditClassifier& model,
                            std::span<const LabeledEdit> data,
                            std::vector<double>* grad) {
  const auto& w = model.weights();
  if (grad) grad->assign(w.size(), 0.0);
  double loss = 0.0;
  if (!data.empty()) {
    const double inv_n = 1.0 / static_cast<double>(data.size());
    for (const auto& d : data) {
      const auto x = model.features(d.edit);
      double z = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
      // -log sigmoid(z) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z)
      loss += inv_n * (d.correct ? softplus(-z) : softplus(z));
      if (grad) {
        const double dz = inv_n * (sigmoid(z) - (d.correct ? 1.0 : 0.0));
        for (std::size_t i = 0; i < x.size(); ++i) (*grad)[i] += dz * x[i];
      }
    }
  }
  const double l2 = model.config().l2;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    loss += 0.5 * l2 * w[i] * w[i];
    if (grad) (*grad)[i] += l2 * w[i];
  }
  return loss;
}

EditClassifier train_edit_classifier(std::span<const LabeledEdit> data,
                                     std::vector<std::string> roster,
                                     const EditClassifierConfig& config) {
  config.validate();
  if (data.empty()) throw EmptyCorpus("no labeled edits to train the edit classifier on");
  EditClassifier model(std::move(roster));
  model.config() = config;
  std::vector<double> w = model.weights();
  std::vector<double> grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    edit_classifier_loss(model, data, &grad);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * grad[i];
    model.set_weights(w);
  }
  return model;
}

}  // namespace qecomb
