#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qecomb/tokens.hpp"

namespace qecomb {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";
inline constexpr const char* kUnk = "<unk>";

// Add-k smoothed n-gram model. When a history has never been seen the
// estimate backs off to the next shorter history; the unigram level is
// always defined, so an empty model predicts uniformly over the vocabulary.
//
// The prediction vocabulary is the training words plus </s> and <unk>.
//
// Text artifact (version 1):
//   qecomb-ngram 1
//   order <n>
//   k <k>
//   vocab <V>
//   <word>                 (V lines, sorted)
//   ngrams <n> <entries>   (for n = 1..order)
//   <count>\t<w1 ... wn>   (entries lines, sorted)
//   end
class NgramModel {
 public:
  explicit NgramModel(int order = 3, double k = 0.1);

  static NgramModel train(std::span<const TokenSeq> corpus, int order = 3,
                          double k = 0.1);

  void add_word(const std::string& word);
  void add_sentence(const TokenSeq& sentence);

  int order() const { return order_; }
  double k() const { return k_; }
  // Size of the prediction vocabulary (words + </s> + <unk>).
  std::size_t vocab_size() const;
  bool empty() const { return total_ == 0 && vocab_.empty(); }
  std::uint64_t count(const TokenSeq& ngram) const;
  std::uint64_t unigram_count(const std::string& word) const;

  // Natural-log probability of `word` after `history` (already padded).
  double log_prob(std::span<const std::string> history,
                  const std::string& word) const;

  // Log-probabilities of each token and of the closing </s>: m + 1 values.
  std::vector<double> sentence_log_probs(const TokenSeq& sentence) const;

  // exp(-mean log-prob) over the m + 1 predicted tokens.
  double perplexity(const TokenSeq& sentence) const;

  void save(std::ostream& out) const;
  static NgramModel load(std::istream& in);

  void save_file(const std::string& path) const;
  static NgramModel load_file(const std::string& path);

 private:
  const std::string& map_word(const std::string& word) const;

  int order_;
  double k_;
  std::set<std::string> vocab_;
  // counts_[n-1]: n-gram (space-joined) -> count.
  std::vector<std::unordered_map<std::string, std::uint64_t>> counts_;
  // contexts_[n-1]: history of n-gram order n+1 -> summed count.
  std::vector<std::unordered_map<std::string, std::uint64_t>> contexts_;
  std::uint64_t total_ = 0;
};

}  // namespace qecomb
