#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "qecomb/scoring.hpp"

namespace qecomb {

// Environment variable that, when set and non-empty, replaces the
// configured external scorer endpoint.
inline constexpr const char* kScorerEndpointEnv = "QECOMB_SCORER_ENDPOINT";

std::string resolve_scorer_endpoint(const std::string& configured);

// Client for a scorer running in another process. Messages are one JSON
// object per line. The peer greets with {"protocol":1,"capabilities":[...]};
// requests are {"id","kind":"tokens"|"sentence","source","hypothesis"} and
// replies {"id","word_probs","gap_probs"}, {"id","score"} or
// {"id","code","message"}, in any order.
//
// Endpoints: "tcp:HOST:PORT" connects to a listening sidecar; "stdio:CMD"
// (or a bare CMD) starts CMD through /bin/sh and talks over its stdin and
// stdout. Any transport failure, error reply or malformed reply throws
// ScorerError. Calls are serialized on one connection.
class ExternalScorer final : public Scorer {
 public:
  static constexpr int kProtocolVersion = 1;
  struct Connection;

  explicit ExternalScorer(const std::string& endpoint);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  std::string name() const override { return "external"; }
  const std::vector<std::string>& capabilities() const { return capabilities_; }

  // Uses token requests when the peer offers them, sentence requests
  // otherwise.
  std::vector<double> score_batch(const TokenSeq& source,
                                  std::span<const TokenSeq> hypotheses) const override;

  bool has_token_labels() const override { return tokens_; }
  std::vector<LabelVector> label_batch(const TokenSeq& source,
                                       std::span<const TokenSeq> hypotheses) const override;

 private:
  std::unique_ptr<Connection> conn_;
  std::vector<std::string> capabilities_;
  bool tokens_ = false;
  bool sentence_ = false;
  mutable std::mutex mutex_;
  mutable long long next_id_ = 0;
};

}  // namespace qecomb
