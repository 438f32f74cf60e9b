#include "qecomb/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qecomb/errors.hpp"

namespace qecomb {

void CombinerConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1]");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must be in [0, 1)");
  }
  if (beam_size < 1) throw std::invalid_argument("beam size must be >= 1");
  if (!(prob_floor > 0.0 && prob_floor < 0.5)) {
    throw std::invalid_argument("probability floor must be in (0, 0.5)");
  }
}

double Scorer::score(const TokenSeq& source, const TokenSeq& hypothesis) const {
  return score_batch(source, std::span<const TokenSeq>(&hypothesis, 1)).front();
}

std::vector<LabelVector> Scorer::label_batch(
    const TokenSeq&, std::span<const TokenSeq>) const {
  throw std::logic_error("scorer '" + name() + "' has no token-level labels");
}

std::vector<double> TokenScorer::score_batch(
    const TokenSeq& source, std::span<const TokenSeq> hypotheses) const {
  const auto labels = label_batch(source, hypotheses);
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(aggregate_q(l));
  return out;
}

double aggregate_q(const LabelVector& labels, double floor) {
  if (!labels.well_formed()) {
    throw ShapeMismatch("gap labels must number word labels + 1");
  }
  auto clamp = [floor](double p) { return std::clamp(p, floor, 1.0); };
  double log_sum = 0.0;
  for (double w : labels.words) log_sum += std::log(clamp(w));
  for (double g : labels.gaps) log_sum += std::log(clamp(g));
  const double n = static_cast<double>(labels.words.size() + labels.gaps.size());
  return std::exp(log_sum / n);
}

double voting_score(std::span<const std::size_t> applied,
                    const EditUnion& edit_union) {
  if (applied.empty()) return 1.0;
  if (edit_union.num_systems < 1) {
    throw std::invalid_argument("voting score needs at least one system");
  }
  const double c = edit_union.num_systems;
  double sum = 0.0;
  for (auto idx : applied) sum += edit_union.edits.at(idx).count / c;
  return sum / static_cast<double>(applied.size());
}

double edit_score(std::span<const std::size_t> applied,
                  const EditUnion& edit_union, double floor) {
  if (edit_union.edits.empty()) return 1.0;
  if (!edit_union.p_es || edit_union.p_es->size() != edit_union.edits.size()) {
    throw MissingProbability("edit union has no per-edit probabilities");
  }
  std::vector<bool> on(edit_union.edits.size(), false);
  for (auto idx : applied) on.at(idx) = true;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < on.size(); ++i) {
    const double p = std::clamp((*edit_union.p_es)[i], floor, 1.0 - floor);
    log_sum += std::log(on[i] ? p : 1.0 - p);
  }
  return std::exp(log_sum / static_cast<double>(on.size()));
}

double biased_score(double q, double v, double es, const CombinerConfig& config) {
  const double f = config.prob_floor;
  q = std::max(q, f);
  v = std::max(v, f);
  es = std::max(es, f);
  return std::pow(q, 1.0 - config.beta) * std::pow(v, config.alpha) *
         std::pow(es, config.beta);
}

ScoreBreakdown score_breakdown(double q, std::span<const std::size_t> applied,
                               const EditUnion& edit_union,
                               const CombinerConfig& config) {
  ScoreBreakdown b;
  b.q = q;
  b.v = edit_union.num_systems > 0 ? voting_score(applied, edit_union) : 1.0;
  if (config.beta > 0.0 || edit_union.p_es) {
    b.es = edit_score(applied, edit_union, config.prob_floor);
  }
  b.q_prime = biased_score(b.q, b.v, b.es, config);
  return b;
}

}  // namespace qecomb
