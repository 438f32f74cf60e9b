#include <algorithm>
#include <map>
#include <random>

#include "qecomb/eval.hpp"
#include "qecomb/training.hpp"

namespace qecomb {

TrainingInstance make_training_instance(std::size_t source_index,
                                        const TokenSeq& source,
                                        const TokenSeq& hypothesis,
                                        const TokenSeq& reference, double z) {
  TrainingInstance inst;
  inst.source_index = source_index;
  inst.source = source;
  inst.hypothesis = hypothesis;
  inst.gold = derive_labels(hypothesis, reference);
  inst.f05 = sentence_f05(extract_edits(source, hypothesis),
                          extract_edits(source, reference));
  const auto introduced = introduced_tokens(source, hypothesis);
  inst.word_weights.assign(hypothesis.size(), 1.0);
  inst.gap_weights.assign(hypothesis.size() + 1, 1.0);
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    if (!introduced[i]) continue;
    inst.word_weights[i] = z;
    inst.gap_weights[i + 1] = z;
  }
  return inst;
}

namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[static_cast<std::size_t>(rng() % i)]);
  }
}

}  // namespace

std::vector<RankedGroup> build_groups(std::span<const TrainingHypothesis> hypotheses,
                                      const TrainConfig& config) {
  const std::size_t n = static_cast<std::size_t>(std::max(1, config.group_size));
  const std::size_t quota = (n + 1) / 2;

  std::map<std::size_t, std::vector<TrainingInstance>> by_source;
  for (const auto& h : hypotheses) {
    if (h.hypothesis == h.source) continue;     // no edits
    if (h.hypothesis == h.reference) continue;  // perfect
    by_source[h.source_index].push_back(
        make_training_instance(h.source_index, h.source, h.hypothesis, h.reference, config.z));
  }

  std::vector<std::vector<TrainingInstance>> buckets;
  buckets.reserve(by_source.size());
  for (auto& [idx, members] : by_source) buckets.push_back(std::move(members));
  std::mt19937_64 rng(config.seed);
  seeded_shuffle(buckets, rng);

  std::vector<RankedGroup> groups;
  std::vector<RankedGroup> partial;                  // >= quota, < n
  std::vector<std::vector<TrainingInstance>> small;  // < quota
  for (auto& bucket : buckets) {
    std::size_t pos = 0;
    for (; pos + n <= bucket.size(); pos += n) {
      RankedGroup g;
      g.members.assign(std::make_move_iterator(bucket.begin() + static_cast<std::ptrdiff_t>(pos)),
                       std::make_move_iterator(bucket.begin() + static_cast<std::ptrdiff_t>(pos + n)));
      groups.push_back(std::move(g));
    }
    if (pos == bucket.size()) continue;
    std::vector<TrainingInstance> rest(
        std::make_move_iterator(bucket.begin() + static_cast<std::ptrdiff_t>(pos)),
        std::make_move_iterator(bucket.end()));
    if (rest.size() >= quota) {
      partial.push_back(RankedGroup{std::move(rest), false});
    } else {
      small.push_back(std::move(rest));
    }
  }

  // Top up partial groups with small fragments, then pack what is left.
  std::vector<TrainingInstance> spill;
  for (auto& frag : small) {
    for (auto& m : frag) spill.push_back(std::move(m));
  }
  std::size_t next = 0;
  for (auto& g : partial) {
    while (g.members.size() < n && next < spill.size()) {
      g.members.push_back(std::move(spill[next++]));
    }
    groups.push_back(std::move(g));
  }
  while (next < spill.size()) {
    RankedGroup g;
    g.leftover = true;
    while (g.members.size() < n && next < spill.size()) {
      g.members.push_back(std::move(spill[next++]));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace qecomb
