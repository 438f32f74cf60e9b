#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qecomb/errors.hpp"
#include "qecomb/eval.hpp"
#include "qecomb/ngram_lm.hpp"

using namespace qecomb;

TEST(NgramModel, EmptyModelIsUniform) {
  NgramModel lm(3, 0.1);
  for (const char* w : {"a", "b", "c", "d", "e"}) lm.add_word(w);
  EXPECT_EQ(lm.vocab_size(), 7u);
  EXPECT_NEAR(lm.perplexity(tokenize("a b c")), 7.0, 1e-9);
  EXPECT_NEAR(lm.perplexity(tokenize("zzz")), 7.0, 1e-9);
}

TEST(NgramModel, TwoWordHandCase) {
  const std::vector<TokenSeq> corpus = {{"a", "b"}};
  const NgramModel lm = NgramModel::train(corpus, 2, 1.0);
  EXPECT_EQ(lm.vocab_size(), 4u);
  // Seen bigrams: (1 + 1) / (1 + 4) each.
  const auto lps = lm.sentence_log_probs({"a", "b"});
  ASSERT_EQ(lps.size(), 3u);
  for (double lp : lps) EXPECT_NEAR(lp, std::log(0.4), 1e-12);
  EXPECT_NEAR(lm.perplexity({"a", "b"}), 2.5, 1e-9);
  // Unseen bigrams with seen histories: 1 / 5.
  EXPECT_NEAR(lm.perplexity({"b", "a"}), 5.0, 1e-9);
  // Unknown word: 1/5 after <s>, then an unseen history backs off to the
  // unigram </s>: (1 + 1) / (3 + 4).
  EXPECT_NEAR(lm.perplexity({"c"}), std::exp(-(std::log(0.2) + std::log(2.0 / 7.0)) / 2), 1e-9);
}

TEST(NgramModel, DistributionSumsToOne) {
  const std::vector<TokenSeq> corpus = {tokenize("the cat sat"), tokenize("the dog sat down"),
                                        tokenize("a cat ran")};
  const NgramModel lm = NgramModel::train(corpus, 3, 0.1);
  std::vector<std::string> words = {"the", "cat", "sat", "dog", "down", "a", "ran", kEos, kUnk};
  for (const TokenSeq& history : {TokenSeq{kBos, kBos}, TokenSeq{kBos, "the"}, TokenSeq{"the", "cat"},
                                  TokenSeq{"cat", "zebra"}}) {
    double total = 0.0;
    for (const auto& w : words) total += std::exp(lm.log_prob(history, w));
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(NgramModel, SaveLoadRoundTrip) {
  const std::vector<TokenSeq> corpus = {tokenize("the cat sat"), tokenize("the dog sat down")};
  const NgramModel lm = NgramModel::train(corpus, 3, 0.25);
  std::stringstream buf;
  lm.save(buf);
  const NgramModel back = NgramModel::load(buf);
  EXPECT_EQ(back.order(), 3);
  EXPECT_EQ(back.k(), 0.25);
  EXPECT_EQ(back.vocab_size(), lm.vocab_size());
  for (const auto& s : {tokenize("the cat sat down"), tokenize("a zebra")}) {
    EXPECT_EQ(back.sentence_log_probs(s), lm.sentence_log_probs(s));
  }
  std::stringstream again;
  back.save(again);
  std::stringstream first;
  lm.save(first);
  EXPECT_EQ(again.str(), first.str());
}

TEST(NgramModel, LoadRejectsForeignInput) {
  std::stringstream junk("hello\n");
  EXPECT_THROW(NgramModel::load(junk), FormatError);
  std::stringstream version("qecomb-ngram 2\n");
  EXPECT_THROW(NgramModel::load(version), SchemaMismatch);
  std::stringstream truncated("qecomb-ngram 1\norder 2\n");
  EXPECT_THROW(NgramModel::load(truncated), FormatError);
}

TEST(NgramModel, RejectsBadParameters) {
  EXPECT_THROW(NgramModel(0, 0.1), std::invalid_argument);
  EXPECT_THROW(NgramModel(3, 0.0), std::invalid_argument);
}

TEST(Fluency, MedianPerplexity) {
  NgramModel lm(2, 1.0);
  for (const char* w : {"a", "b"}) lm.add_word(w);
  const std::vector<TokenSeq> corpus = {{"a"}, {"a", "b"}, {"b", "b", "a"}};
  const auto report = fluency_report(corpus, &lm);
  ASSERT_EQ(report.perplexities.size(), 3u);
  for (double p : report.perplexities) EXPECT_NEAR(p, 4.0, 1e-9);
  EXPECT_NEAR(report.median_perplexity, 4.0, 1e-9);
}

TEST(Fluency, RequiresModel) {
  const std::vector<TokenSeq> corpus = {{"a"}};
  EXPECT_THROW(fluency_report(corpus, nullptr), ModelNotLoaded);
  NgramModel empty(2, 1.0);
  EXPECT_THROW(fluency_report(corpus, &empty), ModelNotLoaded);
}
