#include "qecomb/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <vector>

#include <json.hpp>

namespace qecomb {

// Keys stay in insertion order so reports read top-down.
using json = nlohmann::ordered_json;

std::string combination_record(std::size_t sentence, const SentenceCombination& result) {
  const auto& u = result.edit_union;
  const std::set<std::size_t> applied(result.best.applied.begin(), result.best.applied.end());
  json edits = json::array();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& e = u.edits[i];
    json je = {{"start", e.start},
               {"end", e.end},
               {"replacement", join(e.replacement)},
               {"type", e.type.label()},
               {"count", e.count},
               {"proposers", std::vector<std::string>(e.proposers.begin(), e.proposers.end())}};
    if (u.p_es) je["p_es"] = (*u.p_es)[i];
    je["applied"] = applied.contains(i);
    edits.push_back(std::move(je));
  }
  json j = {{"sentence", sentence},
            {"source", join(u.source)},
            {"output", join(result.best.realized)},
            {"edits", std::move(edits)},
            {"q", result.best.breakdown.q},
            {"v", result.best.breakdown.v},
            {"es", result.best.breakdown.es},
            {"q_prime", result.best.breakdown.q_prime},
            {"beam",
             {{"scorer_calls", result.stats.scorer_calls},
              {"hypotheses_scored", result.stats.hypotheses_scored},
              {"max_beam", result.stats.max_beam}}}};
  return j.dump();
}

std::string score_json(const CorpusScore& score) {
  const json j = {{"tp", score.tp},
                  {"fp", score.fp},
                  {"fn", score.fn},
                  {"precision", score.precision},
                  {"recall", score.recall},
                  {"f05", score.f05}};
  return j.dump();
}

std::string score_table(std::span<const NamedScore> rows) {
  const std::vector<std::string> header = {"system", "tp", "fp", "fn", "P", "R", "F0.5"};
  std::vector<std::vector<std::string>> cells;
  cells.push_back(header);
  char buf[64];
  for (const auto& r : rows) {
    std::vector<std::string> row = {r.name, std::to_string(r.score.tp),
                                    std::to_string(r.score.fp), std::to_string(r.score.fn)};
    for (double v : {r.score.precision, r.score.recall, r.score.f05}) {
      std::snprintf(buf, sizeof buf, "%.4f", v);
      row.emplace_back(buf);
    }
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      const auto pad = std::string(width[c] - row[c].size(), ' ');
      // Name column left-aligned, numbers right-aligned.
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

}  // namespace qecomb
