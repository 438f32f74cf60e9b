#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qecomb/edit.hpp"
#include "qecomb/tokens.hpp"

namespace qecomb {

inline constexpr double kProbFloor = 1e-9;

struct ScoreBreakdown {
  double q = 1.0;
  double v = 1.0;
  double es = 1.0;
  double q_prime = 1.0;
};

struct CombinerConfig {
  double alpha = 0.4;
  double beta = 0.0;
  int beam_size = 16;
  double prob_floor = kProbFloor;
  // Largest union the exhaustive combiner accepts.
  std::size_t brute_force_cap = 20;

  // Throws std::invalid_argument when a field is out of bounds.
  void validate() const;
};

// Quality-estimation scorer. Implementations must be deterministic for
// fixed inputs and safe to call concurrently; anything with mutable state
// serializes internally.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::string name() const = 0;

  // Q(source, h) in (0, 1] for every hypothesis of one source sentence.
  virtual std::vector<double> score_batch(
      const TokenSeq& source, std::span<const TokenSeq> hypotheses) const = 0;

  double score(const TokenSeq& source, const TokenSeq& hypothesis) const;

  // Token-level capability: |words| == m, |gaps| == m + 1, entries in [0, 1].
  virtual bool has_token_labels() const { return false; }
  virtual std::vector<LabelVector> label_batch(
      const TokenSeq& source, std::span<const TokenSeq> hypotheses) const;
};

// Base for scorers whose sentence score is aggregate_q of their labels.
class TokenScorer : public Scorer {
 public:
  std::vector<double> score_batch(
      const TokenSeq& source,
      std::span<const TokenSeq> hypotheses) const final;
  bool has_token_labels() const final { return true; }
  std::vector<LabelVector> label_batch(
      const TokenSeq& source,
      std::span<const TokenSeq> hypotheses) const override = 0;
};

// Normalized product of word and gap probabilities, entries floored at
// `floor`: (prod w * prod g)^(1 / (2m + 1)).
double aggregate_q(const LabelVector& labels, double floor = kProbFloor);

// Mean count(e)/c over applied edits (indices into union.edits); 1 for an
// empty set.
double voting_score(std::span<const std::size_t> applied,
                    const EditUnion& edit_union);

// Geometric mean over the whole union of p_es(e) for applied edits and
// 1 - p_es(e) for the rest. Throws MissingProbability without p_es.
double edit_score(std::span<const std::size_t> applied,
                  const EditUnion& edit_union, double floor = kProbFloor);

// q^(1-beta) * v^alpha * es^beta.
double biased_score(double q, double v, double es, const CombinerConfig& config);

ScoreBreakdown score_breakdown(double q, std::span<const std::size_t> applied,
                               const EditUnion& edit_union,
                               const CombinerConfig& config);

}  // namespace qecomb
