#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qecomb/edit.hpp"
#include "qecomb/scoring.hpp"

namespace qecomb {

struct EditClassifierConfig {
  double learning_rate = 1.0;
  int epochs = 300;
  double l2 = 1e-4;
  double prob_floor = kProbFloor;

  void validate() const;
};

// A union edit with its gold correctness.
struct LabeledEdit {
  Edit edit;
  bool correct = false;
};

// Every union edit labeled by membership in `gold`.
std::vector<LabeledEdit> label_union(const EditUnion& edit_union,
                                     std::span<const Edit> gold);

// Logistic regression over [one-hot edit type | proposer bits | bias].
class EditClassifier {
 public:
  static constexpr int kFormatVersion = 1;

  EditClassifier() = default;
  explicit EditClassifier(std::vector<std::string> roster);

  const std::vector<std::string>& roster() const { return roster_; }
  std::size_t num_features() const { return kNumEditTypes + roster_.size() + 1; }

  std::vector<double> features(const Edit& edit) const;
  double predict(const Edit& edit) const;

  // Fills union.p_es. Throws RosterMismatch unless `systems` equals the
  // training roster.
  void annotate(EditUnion& edit_union, std::span<const std::string> systems) const;

  const std::vector<double>& weights() const { return weights_; }
  void set_weights(std::vector<double> weights);

  EditClassifierConfig& config() { return config_; }
  const EditClassifierConfig& config() const { return config_; }

  void save_file(const std::string& path) const;
  static EditClassifier load_file(const std::string& path);

 private:
  std::vector<std::string> roster_;
  std::vector<double> weights_;
  EditClassifierConfig config_;
};

// Mean BCE plus l2/2 * |w|^2 (bias excluded); `grad` receives dL/dweights.
double edit_classifier_loss(const EditClassifier& model,
                            std::span<const LabeledEdit> data,
                            std::vector<double>* grad = nullptr);

// Full-batch gradient descent from zero weights. Throws EmptyCorpus.
EditClassifier train_edit_classifier(std::span<const LabeledEdit> data,
                                     std::vector<std::string> roster,
                                     const EditClassifierConfig& config = {});

}  // namespace qecomb
