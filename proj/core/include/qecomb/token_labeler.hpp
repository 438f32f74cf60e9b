#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qecomb/ngram_lm.hpp"
#include "qecomb/scoring.hpp"
#include "qecomb/training.hpp"

namespace qecomb {

// Dense row-major feature block: rows x cols.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
};

struct LabelFeatures {
  FeatureMatrix words;  // m rows
  FeatureMatrix gaps;   // m + 1 rows
};

// Logistic word and gap labelers over hand-built features (LM log-probs,
// frequency bucket, introduced-token flags, casing and punctuation). The
// LM is optional; without it the LM-derived columns are zero.
class TokenLabeler final : public TokenScorer {
 public:
  static constexpr int kFormatVersion = 1;

  explicit TokenLabeler(std::shared_ptr<const NgramModel> lm = nullptr);

  static const std::vector<std::string>& word_feature_names();
  static const std::vector<std::string>& gap_feature_names();

  std::string name() const override { return "labeler"; }

  LabelFeatures featurize(const TokenSeq& source, const TokenSeq& hypothesis) const;
  LabelVector predict(const LabelFeatures& features) const;
  LabelVector predict(const TokenSeq& source, const TokenSeq& hypothesis) const;

  std::vector<LabelVector> label_batch(
      const TokenSeq& source,
      std::span<const TokenSeq> hypotheses) const override;

  // Word weights followed by gap weights.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
  std::size_t num_parameters() const;

  const std::shared_ptr<const NgramModel>& lm() const { return lm_; }
  void set_lm(std::shared_ptr<const NgramModel> lm) { lm_ = std::move(lm); }

  TrainConfig& config() { return config_; }
  const TrainConfig& config() const { return config_; }

  // Self-describing JSON artifact. load() refuses mismatched feature
  // schemas or versions with SchemaMismatch.
  void save_file(const std::string& path) const;
  static TokenLabeler load_file(const std::string& path,
                                std::shared_ptr<const NgramModel> lm);

 private:
  std::shared_ptr<const NgramModel> lm_;
  std::vector<double> word_weights_;
  std::vector<double> gap_weights_;
  TrainConfig config_;
};

// Training instance with its features precomputed.
struct FeaturizedGroup {
  const RankedGroup* group = nullptr;
  std::vector<LabelFeatures> features;
};

std::vector<FeaturizedGroup> featurize_groups(const TokenLabeler& labeler,
                                              std::span<const RankedGroup> groups);

// Total loss of the labeler on `groups`; `grad` (optional) receives
// dL/dparameters in parameters() order.
LossTerms labeler_loss(const TokenLabeler& labeler,
                       std::span<const FeaturizedGroup> groups,
                       const TrainConfig& config,
                       std::vector<double>* grad = nullptr);

struct TrainingLog {
  std::vector<double> epoch_loss;  // [0] is the loss at initialization
};

// Full-batch losses are logged per epoch; updates are plain gradient
// descent over seeded mini-batches of groups. Throws EmptyCorpus.
TokenLabeler train_token_labeler(std::span<const RankedGroup> groups,
                                 std::shared_ptr<const NgramModel> lm,
                                 const TrainConfig& config,
                                 TrainingLog* log = nullptr);

}  // namespace qecomb
