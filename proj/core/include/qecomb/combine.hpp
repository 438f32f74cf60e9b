#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qecomb/edit.hpp"
#include "qecomb/edit_classifier.hpp"
#include "qecomb/scoring.hpp"

namespace qecomb {

// A hypothesis built from a subset of union edits. `applied` holds union
// indices in the order they were added, which is ascending because edits
// are visited left to right; it doubles as the provenance.
struct Candidate {
  std::vector<std::size_t> applied;
  TokenSeq realized;
  ScoreBreakdown breakdown;

  std::vector<Edit> applied_edits(const EditUnion& edit_union) const;
};

// Higher Q' first, then fewer edits, then the lexicographically smaller
// provenance.
bool ranks_before(const Candidate& a, const Candidate& b);

struct BeamStats {
  std::size_t scorer_calls = 0;       // score_batch invocations
  std::size_t hypotheses_scored = 0;
  std::size_t max_beam = 0;
};

Candidate beam_combine(const TokenSeq& source, const EditUnion& edit_union,
                       const Scorer& scorer, const CombinerConfig& config,
                       BeamStats* stats = nullptr);

// Scores every conflict-free subset. Throws TooManyEdits above
// config.brute_force_cap.
Candidate brute_force_combine(const TokenSeq& source, const EditUnion& edit_union,
                              const Scorer& scorer, const CombinerConfig& config,
                              BeamStats* stats = nullptr);

// Number of conflict-free subsets of the union (including the empty one).
std::size_t count_consistent_subsets(const EditUnion& edit_union);

struct RerankResult {
  TokenSeq hypothesis;
  // Position in the input list; hypotheses.size() when the source won.
  std::size_t index = 0;
  double q = 0.0;
};

// Picks the highest-Q entry among the hypotheses and the source (appended
// last). Ties keep the earlier entry.
RerankResult rerank(const TokenSeq& source, std::span<const TokenSeq> hypotheses,
                    const Scorer& scorer);

// Applies the union edits that are also gold, dropping any that conflict
// with an earlier kept one. The breakdown is left at its defaults.
Candidate oracle_combine(const EditUnion& edit_union, std::span<const Edit> gold);

// Outputs of one base system, parallel to the source corpus.
struct SystemOutput {
  std::string id;
  std::vector<TokenSeq> hypotheses;
};

EditUnion build_union(const TokenSeq& source,
                      std::span<const SystemOutput> systems, std::size_t sentence);

struct SentenceCombination {
  EditUnion edit_union;
  Candidate best;
  BeamStats stats;
};

// Union of the systems' edits for sentence `sentence`, p_ES from
// `classifier` when given, then beam search.
SentenceCombination combine_sentence(const TokenSeq& source,
                                     std::span<const SystemOutput> systems,
                                     std::size_t sentence, const Scorer& scorer,
                                     const CombinerConfig& config,
                                     const EditClassifier* classifier = nullptr);

// Sentence-parallel combine_sentence over a corpus; results keep input
// order and do not depend on `workers`.
std::vector<SentenceCombination> combine_corpus(std::span<const TokenSeq> sources,
                                                std::span<const SystemOutput> systems,
                                                const Scorer& scorer,
                                                const CombinerConfig& config,
                                                const EditClassifier* classifier,
                                                int workers);

}  // namespace qecomb
