#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qecomb/edit.hpp"
#include "qecomb/tokens.hpp"

namespace qecomb {

struct TrainConfig {
  double gamma = 0.2;   // rank-loss weight
  double mu = 5.0;      // rank-loss margin multiplier
  double sigma = 1.0;   // RankNet scale
  double z = 2.0;       // weight of labels tied to introduced tokens
  int group_size = 4;
  int batch_size = 32;  // hypotheses per step; multiple of group_size
  double learning_rate = 0.5;
  int epochs = 20;
  std::uint64_t seed = 13;
  double prob_floor = 1e-9;

  void validate() const;
};

// Weighted mean binary cross-entropy. Predictions are clamped to
// [floor, 1 - floor]; an empty `weights` means all ones. When `grad` is
// given it receives dL/dpred (zero where the clamp is active).
double bce_loss(std::span<const double> pred, std::span<const double> gold,
                std::span<const double> weights, double floor,
                std::vector<double>* grad = nullptr);

double word_loss(std::span<const double> pred, std::span<const double> gold,
                 std::span<const double> weights = {}, double floor = 1e-9,
                 std::vector<double>* grad = nullptr);

double gap_loss(std::span<const double> pred, std::span<const double> gold,
                std::span<const double> weights = {}, double floor = 1e-9,
                std::vector<double>* grad = nullptr);

// Sum over pairs with f05[v] > f05[u] of log(1 + exp(-sigma * mu * (q[v] - q[u]))).
// `grad` receives dL/dq.
double rank_loss(std::span<const double> q, std::span<const double> f05,
                 double sigma, double mu, std::vector<double>* grad = nullptr);

// Number of strictly ordered pairs the rank loss sums over.
std::size_t rank_pair_count(std::span<const double> f05);

// A hypothesis with gold labels, its quality target and per-label weights.
struct TrainingInstance {
  std::size_t source_index = 0;
  TokenSeq source;
  TokenSeq hypothesis;
  LabelVector gold;
  double f05 = 0.0;
  std::vector<double> word_weights;
  std::vector<double> gap_weights;
};

struct RankedGroup {
  std::vector<TrainingInstance> members;
  // Tail group assembled from fragments that could not meet the
  // same-source quota.
  bool leftover = false;
};

// Labels from derive_labels(h, reference), f05 from sentence_f05 of the
// source-frame edits. Words introduced by the correction (and the gap after
// them) get weight z.
TrainingInstance make_training_instance(std::size_t source_index,
                                        const TokenSeq& source,
                                        const TokenSeq& hypothesis,
                                        const TokenSeq& reference, double z);

struct TrainingHypothesis {
  std::size_t source_index = 0;
  TokenSeq source;
  TokenSeq hypothesis;
  TokenSeq reference;
};

// Drops hypotheses with no edits and perfect ones, then packs groups of
// `group_size` keeping each source together: every non-leftover group has
// at least ceil(n/2) members from one source. Deterministic for a seed.
std::vector<RankedGroup> build_groups(std::span<const TrainingHypothesis> hypotheses,
                                      const TrainConfig& config);

// Per-instance prediction used by total_loss.
struct InstancePrediction {
  LabelVector pred;
  double q = 0.0;
};

struct InstanceGradient {
  std::vector<double> d_words;
  std::vector<double> d_gaps;
  double d_q = 0.0;
};

struct LossTerms {
  double word = 0.0;  // mean over instances
  double gap = 0.0;   // mean over instances
  double rank = 0.0;  // summed over groups
  double total = 0.0;
};

// mean L_w + mean L_g + gamma * sum of group rank losses. `predictions`
// mirrors `groups` member for member.
LossTerms total_loss(std::span<const RankedGroup> groups,
                     std::span<const std::vector<InstancePrediction>> predictions,
                     const TrainConfig& config,
                     std::vector<std::vector<InstanceGradient>>* grads = nullptr);

}  // namespace qecomb
