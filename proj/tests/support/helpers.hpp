#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qecomb/combine.hpp"
#include "qecomb/scoring.hpp"

namespace qecomb::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

void write_file(const std::string& path, const std::string& text);
void write_lines(const std::string& path, const std::vector<TokenSeq>& lines);
std::string read_file(const std::string& path);

// Score looked up by the joined hypothesis; unknown hypotheses get
// `fallback`. Counts scored hypotheses.
class TableScorer final : public Scorer {
 public:
  explicit TableScorer(std::map<std::string, double> table, double fallback = 0.1)
      : table_(std::move(table)), fallback_(fallback) {}

  std::string name() const override { return "table"; }
  std::vector<double> score_batch(const TokenSeq& source,
                                  std::span<const TokenSeq> hypotheses) const override;

  std::size_t scored() const { return scored_; }

 private:
  std::map<std::string, double> table_;
  double fallback_;
  mutable std::atomic<std::size_t> scored_{0};
};

// Wraps another scorer and counts hypotheses and batches.
class CountingScorer final : public Scorer {
 public:
  explicit CountingScorer(const Scorer& inner) : inner_(inner) {}

  std::string name() const override { return "counting"; }
  std::vector<double> score_batch(const TokenSeq& source,
                                  std::span<const TokenSeq> hypotheses) const override;

  std::size_t hypotheses() const { return hypotheses_; }
  std::size_t batches() const { return batches_; }

 private:
  const Scorer& inner_;
  mutable std::atomic<std::size_t> hypotheses_{0};
  mutable std::atomic<std::size_t> batches_{0};
};

// Token scorer whose word and gap probabilities are pseudo-random functions
// of the neighbouring tokens, a random "bigram model". Deterministic for a
// seed.
class RandomBigramScorer final : public TokenScorer {
 public:
  explicit RandomBigramScorer(std::uint64_t seed) : seed_(seed) {}

  std::string name() const override { return "random-bigram"; }
  std::vector<LabelVector> label_batch(const TokenSeq& source,
                                       std::span<const TokenSeq> hypotheses) const override;

 private:
  double unit(const std::string& a, const std::string& b, char tag) const;
  std::uint64_t seed_;
};

// Sentence-level scorer with an independent pseudo-random score per
// distinct hypothesis.
class RandomSentenceScorer final : public Scorer {
 public:
  explicit RandomSentenceScorer(std::uint64_t seed) : seed_(seed) {}

  std::string name() const override { return "random-sentence"; }
  std::vector<double> score_batch(const TokenSeq& source,
                                  std::span<const TokenSeq> hypotheses) const override;

 private:
  std::uint64_t seed_;
};

struct RandomInstance {
  TokenSeq source;
  EditUnion edit_union;
  CombinerConfig config;
};

// Random source over a small vocabulary, up to `max_edits` random
// insertions, deletions and substitutions (conflicts allowed) spread over
// five systems, random p_ES, alpha and beta.
RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_edits);

double uniform(std::mt19937_64& rng, double lo, double hi);

}  // namespace qecomb::testing
