#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "qecomb/combine.hpp"
#include "qecomb/eval.hpp"

namespace qecomb {

// One line of the combination debug report (no trailing newline):
//   {"sentence":N,"source":..,"output":..,
//    "edits":[{"start","end","replacement","type","count","proposers",
//              "p_es"?, "applied"}],
//    "q","v","es","q_prime","beam":{"scorer_calls","hypotheses_scored","max_beam"}}
// `sentence` is 0-based.
std::string combination_record(std::size_t sentence, const SentenceCombination& result);

// {"tp","fp","fn","precision","recall","f05"} on one line.
std::string score_json(const CorpusScore& score);

struct NamedScore {
  std::string name;
  CorpusScore score;
};

// Aligned plain-text table, one row per entry, 4-decimal reals.
std::string score_table(std::span<const NamedScore> rows);

}  // namespace qecomb
