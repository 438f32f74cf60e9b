#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qecomb/edit.hpp"
#include "qecomb/tokens.hpp"

namespace qecomb {

class NgramModel;

struct EditCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  EditCounts& operator+=(const EditCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend EditCounts operator+(EditCounts a, const EditCounts& b) { return a += b; }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

struct CorpusScore {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f05 = 1.0;

  static CorpusScore from_counts(const EditCounts& counts);
};

// (1 + b^2) p r / (b^2 p + r), 0 when the denominator vanishes.
double f_beta(double precision, double recall, double beta = 0.5);

// Exact-match counts between one sentence's hypothesis and gold edits.
EditCounts count_edits(std::span<const Edit> hypothesis,
                       std::span<const Edit> gold);

// Gold edit sets keyed by annotator id.
using GoldSets = std::map<int, std::vector<Edit>>;

// Corpus F0.5; each sentence uses the annotator that maximizes the running
// corpus F0.5 (ties go to the lower id). Throws LengthMismatch.
CorpusScore corpus_f05(std::span<const std::vector<Edit>> hypotheses,
                       std::span<const GoldSets> gold);

struct SentenceF05Options {
  // Score for a sentence with neither gold nor hypothesis edits.
  double empty_score = 1.0;
};

double sentence_f05(std::span<const Edit> hypothesis, std::span<const Edit> gold,
                    const SentenceF05Options& options = {});

// Best sentence F0.5 over annotators.
double sentence_f05(std::span<const Edit> hypothesis, const GoldSets& gold,
                    const SentenceF05Options& options = {});

// Mean ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average ranks. Throws DegenerateInput if either
// side is constant and LengthMismatch on unequal sizes.
double spearman(std::span<const double> x, std::span<const double> y);

// Fraction of resamples on which system B's corpus F0.5 >= system A's.
// Sentence indices are drawn with replacement from a seeded mt19937_64.
double bootstrap_significance(std::span<const std::vector<Edit>> system_a,
                              std::span<const std::vector<Edit>> system_b,
                              std::span<const GoldSets> gold,
                              std::size_t samples, std::uint64_t seed);

// Same statistic over caller-provided resamples (each a list of sentence
// indices).
double bootstrap_from_resamples(
    std::span<const std::vector<Edit>> system_a,
    std::span<const std::vector<Edit>> system_b, std::span<const GoldSets> gold,
    std::span<const std::vector<std::size_t>> resamples);

struct WilliamsResult {
  double t = 0.0;
  int dof = 0;
  // One-sided p-value for the direction of t.
  double p_value = 1.0;
};

// Williams' test for r12 vs r13, both correlated with variable 1, given
// r23 and sample size n. Throws DomainError when the correlation matrix
// determinant is not positive.
WilliamsResult williams_test(double r12, double r13, double r23, int n);

double median(std::vector<double> values);

struct FluencyReport {
  std::vector<double> perplexities;
  double median_perplexity = 0.0;
};

// Throws ModelNotLoaded when lm is null or empty.
FluencyReport fluency_report(std::span<const TokenSeq> corrections,
                             const NgramModel* lm);

}  // namespace qecomb
