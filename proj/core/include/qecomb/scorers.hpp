#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qecomb/eval.hpp"
#include "qecomb/ngram_lm.hpp"
#include "qecomb/scoring.hpp"

namespace qecomb {

// 0.5 for every word and gap, hence Q = 0.5.
class UniformScorer final : public TokenScorer {
 public:
  std::string name() const override { return "uniform"; }
  std::vector<LabelVector> label_batch(
      const TokenSeq& source,
      std::span<const TokenSeq> hypotheses) const override;
};

// Word label i is P(h_i | left context); gap label j is the probability of
// the token that follows gap j (h_{j+1}, or </s> for the last gap).
class NgramScorer final : public TokenScorer {
 public:
  explicit NgramScorer(std::shared_ptr<const NgramModel> lm);

  std::string name() const override { return "ngram"; }
  std::vector<LabelVector> label_batch(
      const TokenSeq& source,
      std::span<const TokenSeq> hypotheses) const override;

  LabelVector labels(const TokenSeq& hypothesis) const;

 private:
  std::shared_ptr<const NgramModel> lm_;
};

// Test-only scorer that knows the references. Its score is a count-smoothed
// sentence F0.5 of h against the reference: precision (tp + d)/(tp + fp + d)
// and recall (tp + d)/(tp + fn + d) with d = kSmoothing. This equals 1 iff
// h reproduces the reference and, unlike the raw metric, stays strictly
// monotone when tp, fp or fn move from zero.
class ReferenceOracleScorer final : public Scorer {
 public:
  static constexpr double kSmoothing = 1e-3;

  ReferenceOracleScorer() = default;
  // Pairs of (source, reference); the first reference wins for repeated
  // sources.
  explicit ReferenceOracleScorer(
      std::span<const std::pair<TokenSeq, TokenSeq>> source_references);

  void add(const TokenSeq& source, const TokenSeq& reference);

  std::string name() const override { return "oracle"; }
  std::vector<double> score_batch(
      const TokenSeq& source,
      std::span<const TokenSeq> hypotheses) const override;

  const TokenSeq& reference(const TokenSeq& source) const;

 private:
  struct Entry {
    TokenSeq reference;
    std::vector<Edit> gold;
  };
  std::unordered_map<std::string, Entry> references_;
};

double smoothed_f05(const EditCounts& counts, double smoothing);

}  // namespace qecomb
