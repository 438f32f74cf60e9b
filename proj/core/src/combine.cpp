#include "qecomb/combine.hpp"

#include <algorithm>
#include <set>

#include "qecomb/errors.hpp"
#include "qecomb/parallel.hpp"

namespace qecomb {

namespace {

bool fits(const EditUnion& u, std::span<const std::size_t> applied, std::size_t next) {
  return std::none_of(applied.begin(), applied.end(), [&](std::size_t i) {
    return conflicts(u.edits[i], u.edits[next]);
  });
}

TokenSeq realize(const TokenSeq& source, const EditUnion& u,
                 std::span<const std::size_t> applied) {
  std::vector<Edit> edits;
  edits.reserve(applied.size());
  for (auto i : applied) edits.push_back(u.edits[i]);
  return apply_edits(source, edits);
}

// Scores the candidates in one batch and fills their breakdowns.
void score_candidates(const TokenSeq& source, const EditUnion& u, const Scorer& scorer,
                      const CombinerConfig& config, std::span<Candidate> cands,
                      BeamStats& stats) {
  if (cands.empty()) return;
  std::vector<TokenSeq> hyps;
  hyps.reserve(cands.size());
  for (const auto& c : cands) hyps.push_back(c.realized);
  const auto qs = scorer.score_batch(source, hyps);
  if (qs.size() != cands.size()) {
    throw ScorerError(scorer.name() + " returned " + std::to_string(qs.size()) +
                      " scores for " + std::to_string(cands.size()) + " hypotheses");
  }
  ++stats.scorer_calls;
  stats.hypotheses_scored += cands.size();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    cands[i].breakdown = score_breakdown(qs[i], cands[i].applied, u, config);
  }
}

}  // namespace

std::vector<Edit> Candidate::applied_edits(const EditUnion& edit_union) const {
  std::vector<Edit> out;
  out.reserve(applied.size());
  for (auto i : applied) out.push_back(edit_union.edits[i]);
  return out;
}

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.breakdown.q_prime != b.breakdown.q_prime) {
    return a.breakdown.q_prime > b.breakdown.q_prime;
  }
  if (a.applied.size() != b.applied.size()) return a.applied.size() < b.applied.size();
  return a.applied < b.applied;
}

Candidate beam_combine(const TokenSeq& source, const EditUnion& edit_union,
                       const Scorer& scorer, const CombinerConfig& config,
                       BeamStats* stats) {
  config.validate();
  BeamStats local;
  std::vector<Candidate> beam(1);
  beam[0].realized = source;
  score_candidates(source, edit_union, scorer, config, beam, local);
  const auto width = static_cast<std::size_t>(config.beam_size);

  for (std::size_t e = 0; e < edit_union.size(); ++e) {
    std::vector<Candidate> extended;
    for (const auto& c : beam) {
      if (!fits(edit_union, c.applied, e)) continue;
      Candidate n;
      n.applied = c.applied;
      n.applied.push_back(e);
      n.realized = realize(source, edit_union, n.applied);
      extended.push_back(std::move(n));
    }
    score_candidates(source, edit_union, scorer, config, extended, local);
    beam.insert(beam.end(), std::make_move_iterator(extended.begin()),
                std::make_move_iterator(extended.end()));
    std::stable_sort(beam.begin(), beam.end(), ranks_before);
    local.max_beam = std::max(local.max_beam, beam.size());
    if (beam.size() > width) beam.resize(width);
  }
  local.max_beam = std::max(local.max_beam, beam.size());
  if (stats) *stats = local;
  return beam.front();
}

std::size_t count_consistent_subsets(const EditUnion& edit_union) {
  std::size_t count = 0;
  std::vector<std::size_t> applied;
  auto walk = [&](auto&& self, std::size_t next) -> void {
    if (next == edit_union.size()) {
      ++count;
      return;
    }
    self(self, next + 1);
    if (fits(edit_union, applied, next)) {
      applied.push_back(next);
      self(self, next + 1);
      applied.pop_back();
    }
  };
  walk(walk, 0);
  return count;
}

Candidate brute_force_combine(const TokenSeq& source, const EditUnion& edit_union,
                              const Scorer& scorer, const CombinerConfig& config,
                              BeamStats* stats) {
  config.validate();
  if (edit_union.size() > config.brute_force_cap) {
    throw TooManyEdits("union has " + std::to_string(edit_union.size()) +
                       " edits; exhaustive search is capped at " +
                       std::to_string(config.brute_force_cap));
  }
  std::vector<Candidate> all;
  std::vector<std::size_t> applied;
  auto walk = [&](auto&& self, std::size_t next) -> void {
    if (next == edit_union.size()) {
      Candidate c;
      c.applied = applied;
      c.realized = realize(source, edit_union, applied);
      all.push_back(std::move(c));
      return;
    }
    self(self, next + 1);
    if (fits(edit_union, applied, next)) {
      applied.push_back(next);
      self(self, next + 1);
      applied.pop_back();
    }
  };
  walk(walk, 0);
  BeamStats local;
  score_candidates(source, edit_union, scorer, config, all, local);
  local.max_beam = all.size();
  if (stats) *stats = local;
  return *std::min_element(all.begin(), all.end(), ranks_before);
}

RerankResult rerank(const TokenSeq& source, std::span<const TokenSeq> hypotheses,
                    const Scorer& scorer) {
  std::vector<TokenSeq> pool(hypotheses.begin(), hypotheses.end());
  pool.push_back(source);
  const auto qs = scorer.score_batch(source, pool);
  if (qs.size() != pool.size()) {
    throw ScorerError(scorer.name() + " returned the wrong number of scores");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (qs[i] > qs[best]) best = i;
  }
  return {pool[best], best, qs[best]};
}

Candidate oracle_combine(const EditUnion& edit_union, std::span<const Edit> gold) {
  const std::set<Edit> g(gold.begin(), gold.end());
  Candidate c;
  for (std::size_t i = 0; i < edit_union.size(); ++i) {
    if (g.contains(edit_union.edits[i]) && fits(edit_union, c.applied, i)) {
      c.applied.push_back(i);
    }
  }
  c.realized = realize(edit_union.source, edit_union, c.applied);
  return c;
}

EditUnion build_union(const TokenSeq& source, std::span<const SystemOutput> systems,
                      std::size_t sentence) {
  std::vector<SystemEdits> per_system;
  per_system.reserve(systems.size());
  for (const auto& s : systems) {
    if (sentence >= s.hypotheses.size()) {
      throw LengthMismatch("system " + s.id + " has no hypothesis for sentence " +
                           std::to_string(sentence + 1));
    }
    per_system.push_back({s.id, extract_edits(source, s.hypotheses[sentence])});
  }
  return edit_union(per_system, source);
}

SentenceCombination combine_sentence(const TokenSeq& source,
                                     std::span<const SystemOutput> systems,
                                     std::size_t sentence, const Scorer& scorer,
                                     const CombinerConfig& config,
                                     const EditClassifier* classifier) {
  SentenceCombination out;
  out.edit_union = build_union(source, systems, sentence);
  if (classifier) {
    std::vector<std::string> ids;
    for (const auto& s : systems) ids.push_back(s.id);
    classifier->annotate(out.edit_union, ids);
  }
  out.best = beam_combine(source, out.edit_union, scorer, config, &out.stats);
  return out;
}

std::vector<SentenceCombination> combine_corpus(std::span<const TokenSeq> sources,
                                                std::span<const SystemOutput> systems,
                                                const Scorer& scorer,
                                                const CombinerConfig& config,
                                                const EditClassifier* classifier,
                                                int workers) {
  config.validate();
  for (const auto& s : systems) {
    if (s.hypotheses.size() != sources.size()) {
      throw LengthMismatch("system " + s.id + " has " + std::to_string(s.hypotheses.size()) +
                           " lines, source has " + std::to_string(sources.size()));
    }
  }
  return parallel_map(sources.size(), workers, [&](std::size_t i) {
    return combine_sentence(sources[i], systems, i, scorer, config, classifier);
  });
}

}  // namespace qecomb
