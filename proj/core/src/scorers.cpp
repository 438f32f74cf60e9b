#include "qecomb/scorers.hpp"

#include <algorithm>
#include <cmath>

#include "qecomb/errors.hpp"

namespace qecomb {

std::vector<LabelVector> UniformScorer::label_batch(
    const TokenSeq&, std::span<const TokenSeq> hypotheses) const {
  std::vector<LabelVector> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    out.push_back(LabelVector{std::vector<double>(h.size(), 0.5),
                              std::vector<double>(h.size() + 1, 0.5)});
  }
  return out;
}

NgramScorer::NgramScorer(std::shared_ptr<const NgramModel> lm) : lm_(std::move(lm)) {}

LabelVector NgramScorer::labels(const TokenSeq& hypothesis) const {
  if (!lm_ || lm_->empty()) throw ModelNotLoaded("n-gram scorer has no language model");
  const auto lps = lm_->sentence_log_probs(hypothesis);
  LabelVector l;
  l.words.reserve(hypothesis.size());
  for (std::size_t i = 0; i < hypothesis.size(); ++i) l.words.push_back(std::exp(lps[i]));
  l.gaps.reserve(lps.size());
  for (double lp : lps) l.gaps.push_back(std::exp(lp));
  return l;
}

std::vector<LabelVector> NgramScorer::label_batch(
    const TokenSeq&, std::span<const TokenSeq> hypotheses) const {
  std::vector<LabelVector> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) out.push_back(labels(h));
  return out;
}

double smoothed_f05(const EditCounts& c, double d) {
  const double tp = static_cast<double>(c.tp);
  const double p = (tp + d) / (tp + static_cast<double>(c.fp) + d);
  const double r = (tp + d) / (tp + static_cast<double>(c.fn) + d);
  return f_beta(p, r);
}

ReferenceOracleScorer::ReferenceOracleScorer(
    std::span<const std::pair<TokenSeq, TokenSeq>> source_references) {
  for (const auto& [s, r] : source_references) add(s, r);
}

void ReferenceOracleScorer::add(const TokenSeq& source, const TokenSeq& reference) {
  references_.try_emplace(join(source), Entry{reference, extract_edits(source, reference)});
}

const TokenSeq& ReferenceOracleScorer::reference(const TokenSeq& source) const {
  auto it = references_.find(join(source));
  if (it == references_.end()) {
    throw ModelNotLoaded("oracle scorer has no reference for: " + join(source));
  }
  return it->second.reference;
}

std::vector<double> ReferenceOracleScorer::score_batch(
    const TokenSeq& source, std::span<const TokenSeq> hypotheses) const {
  auto it = references_.find(join(source));
  if (it == references_.end()) {
    throw ModelNotLoaded("oracle scorer has no reference for: " + join(source));
  }
  std::vector<double> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    const auto counts = count_edits(extract_edits(source, h), it->second.gold);
    out.push_back(std::max(smoothed_f05(counts, kSmoothing), kProbFloor));
  }
  return out;
}

}  // namespace qecomb
