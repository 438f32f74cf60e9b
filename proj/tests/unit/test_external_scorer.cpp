#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include "helpers.hpp"
#include "qecomb/combine.hpp"
#include "qecomb/errors.hpp"
#include "qecomb/external_scorer.hpp"

using namespace qecomb;

namespace {

std::string stub(const std::string& args = "") {
  return std::string("stdio:") + QECOMB_STUB_SCORER + (args.empty() ? "" : " " + args);
}

// A stub listening on TCP; the endpoint is known once it prints its port.
class TcpStub {
 public:
  explicit TcpStub(const std::string& args = "") {
    pipe_ = ::popen((std::string(QECOMB_STUB_SCORER) + " --tcp " + args).c_str(), "r");
    int port = 0;
    if (pipe_ == nullptr || std::fscanf(pipe_, "port %d", &port) != 1) throw std::runtime_error("stub did not start");
    endpoint_ = "tcp:127.0.0.1:" + std::to_string(port);
  }
  ~TcpStub() {
    if (pipe_ != nullptr) ::pclose(pipe_);
  }
  const std::string& endpoint() const { return endpoint_; }

 private:
  FILE* pipe_ = nullptr;
  std::string endpoint_;
};

}  // namespace

TEST(ExternalScorer, TokenRepliesAggregate) {
  const ExternalScorer scorer(stub());
  EXPECT_TRUE(scorer.has_token_labels());
  const TokenSeq s = tokenize("a b c");
  const auto labels = scorer.label_batch(s, std::vector<TokenSeq>{tokenize("x y z")});
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].words, (std::vector<double>{0.7, 0.7, 0.7}));
  EXPECT_EQ(labels[0].gaps.size(), 4u);
  const double q = scorer.score(s, tokenize("x y z"));
  EXPECT_NEAR(q, std::pow(std::pow(0.7, 3) * std::pow(0.9, 4), 1.0 / 7), 1e-9);
  EXPECT_NEAR(q, 0.80810, 5e-6);
}

TEST(ExternalScorer, SentenceOnlyPeer) {
  const ExternalScorer scorer(stub("--capabilities sentence"));
  EXPECT_FALSE(scorer.has_token_labels());
  const std::vector<TokenSeq> hyps = {tokenize("a"), tokenize("b c")};
  EXPECT_EQ(scorer.score_batch(tokenize("a"), hyps), (std::vector<double>{0.5, 0.5}));
}

TEST(ExternalScorer, AcceptsOutOfOrderReplies) {
  const ExternalScorer scorer(stub("--shuffle --capabilities sentence --score 0.25"));
  std::vector<TokenSeq> hyps;
  for (int i = 0; i < 40; ++i) hyps.push_back(tokenize("h " + std::to_string(i)));
  const auto q = scorer.score_batch(tokenize("src"), hyps);
  ASSERT_EQ(q.size(), hyps.size());
  for (double v : q) EXPECT_EQ(v, 0.25);
}

TEST(ExternalScorer, ManyRequestsBeyondTheWindow) {
  const ExternalScorer scorer(stub("--shuffle"));
  std::vector<TokenSeq> hyps;
  for (int i = 0; i < 1000; ++i) hyps.push_back(TokenSeq(static_cast<std::size_t>(i % 5), "w"));
  const auto q = scorer.score_batch(tokenize("src"), hyps);
  ASSERT_EQ(q.size(), 1000u);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double m = static_cast<double>(i % 5);
    ASSERT_NEAR(q[i], std::pow(std::pow(0.7, m) * std::pow(0.9, m + 1), 1 / (2 * m + 1)), 1e-12);
  }
}

TEST(ExternalScorer, Failures) {
  const TokenSeq s = tokenize("a b");
  {
    const ExternalScorer dying(stub("--die-after 3"));
    std::vector<TokenSeq> hyps(5, s);
    EXPECT_THROW(dying.score_batch(s, hyps), ScorerError);
  }
  {
    const ExternalScorer erroring(stub("--error"));
    EXPECT_THROW(erroring.score(s, s), ScorerError);
  }
  {
    const ExternalScorer misshapen(stub("--bad-shape"));
    EXPECT_THROW(misshapen.score(s, s), ScorerError);
  }
  {
    const ExternalScorer out_of_range(stub("--capabilities sentence --score 1.5"));
    EXPECT_THROW(out_of_range.score(s, s), ScorerError);
  }
  EXPECT_THROW(ExternalScorer(stub("--capabilities nothing")), ScorerError);
  EXPECT_THROW(ExternalScorer("stdio:/nonexistent/scorer"), ScorerError);
  EXPECT_THROW(ExternalScorer("tcp:127.0.0.1"), ScorerError);
  EXPECT_THROW(ExternalScorer("tcp:127.0.0.1:1"), ScorerError);
}

TEST(ExternalScorer, TcpMatchesStdio) {
  std::mt19937_64 rng(50);
  std::vector<qecomb::testing::RandomInstance> instances;
  for (int i = 0; i < 20; ++i) instances.push_back(qecomb::testing::random_instance(rng, 8));
  const ExternalScorer local(stub());
  const TcpStub server;
  const ExternalScorer remote(server.endpoint());
  for (const auto& inst : instances) {
    const auto a = beam_combine(inst.source, inst.edit_union, local, inst.config);
    const auto b = beam_combine(inst.source, inst.edit_union, remote, inst.config);
    ASSERT_EQ(a.realized, b.realized);
    ASSERT_EQ(a.breakdown.q_prime, b.breakdown.q_prime);
  }
}

TEST(ExternalScorer, EndpointOverride) {
  ::unsetenv(kScorerEndpointEnv);
  EXPECT_EQ(resolve_scorer_endpoint("tcp:h:1"), "tcp:h:1");
  ::setenv(kScorerEndpointEnv, "", 1);
  EXPECT_EQ(resolve_scorer_endpoint("tcp:h:1"), "tcp:h:1");
  ::setenv(kScorerEndpointEnv, "tcp:other:2", 1);
  EXPECT_EQ(resolve_scorer_endpoint("tcp:h:1"), "tcp:other:2");
  ::unsetenv(kScorerEndpointEnv);
}
