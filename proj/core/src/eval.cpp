#include "qecomb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "qecomb/errors.hpp"
#include "qecomb/ngram_lm.hpp"

namespace qecomb {

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

CorpusScore CorpusScore::from_counts(const EditCounts& c) {
  CorpusScore s;
  s.tp = c.tp;
  s.fp = c.fp;
  s.fn = c.fn;
  s.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  s.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  s.f05 = f_beta(s.precision, s.recall);
  return s;
}

EditCounts count_edits(std::span<const Edit> hypothesis,
                       std::span<const Edit> gold) {
  std::set<Edit> hyp(hypothesis.begin(), hypothesis.end());
  std::set<Edit> ref(gold.begin(), gold.end());
  EditCounts c;
  for (const auto& e : hyp) c.tp += ref.count(e);
  c.fp = hyp.size() - c.tp;
  c.fn = ref.size() - c.tp;
  return c;
}

namespace {

EditCounts best_annotator_counts(std::span<const Edit> hypothesis,
                                 const GoldSets& gold,
                                 const EditCounts& running) {
  if (gold.empty()) return count_edits(hypothesis, {});
  EditCounts best;
  double best_f = -1.0;
  for (const auto& [id, edits] : gold) {
    const auto c = count_edits(hypothesis, edits);
    const double f = CorpusScore::from_counts(running + c).f05;
    if (f > best_f) {
      best_f = f;
      best = c;
    }
  }
  return best;
}

EditCounts corpus_counts(std::span<const std::vector<Edit>> hypotheses,
                         std::span<const GoldSets> gold,
                         std::span<const std::size_t> indices) {
  EditCounts total;
  for (auto i : indices) total += best_annotator_counts(hypotheses[i], gold[i], total);
  return total;
}

}  // namespace

CorpusScore corpus_f05(std::span<const std::vector<Edit>> hypotheses,
                       std::span<const GoldSets> gold) {
  if (hypotheses.size() != gold.size()) {
    throw LengthMismatch("hypothesis corpus has " + std::to_string(hypotheses.size()) +
                         " sentences, gold has " + std::to_string(gold.size()));
  }
  std::vector<std::size_t> all(hypotheses.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return CorpusScore::from_counts(corpus_counts(hypotheses, gold, all));
}

double sentence_f05(std::span<const Edit> hypothesis, std::span<const Edit> gold,
                    const SentenceF05Options& options) {
  const auto c = count_edits(hypothesis, gold);
  if (c.tp + c.fp + c.fn == 0) return options.empty_score;
  return CorpusScore::from_counts(c).f05;
}

double sentence_f05(std::span<const Edit> hypothesis, const GoldSets& gold,
                    const SentenceF05Options& options) {
  if (gold.empty()) return sentence_f05(hypothesis, std::span<const Edit>{}, options);
  double best = 0.0;
  for (const auto& [id, edits] : gold) {
    best = std::max(best, sentence_f05(hypothesis, edits, options));
  }
  return best;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("correlation inputs differ in length");
  if (x.size() < 2) throw DegenerateInput("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("correlation of a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("correlation inputs differ in length");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double bootstrap_from_resamples(
    std::span<const std::vector<Edit>> system_a,
    std::span<const std::vector<Edit>> system_b, std::span<const GoldSets> gold,
    std::span<const std::vector<std::size_t>> resamples) {
  if (system_a.size() != system_b.size() || system_a.size() != gold.size()) {
    throw LengthMismatch("bootstrap corpora differ in sentence count");
  }
  if (resamples.empty()) throw std::invalid_argument("bootstrap needs at least one sample");
  std::size_t not_better = 0;
  for (const auto& idx : resamples) {
    const double fa = CorpusScore::from_counts(corpus_counts(system_a, gold, idx)).f05;
    const double fb = CorpusScore::from_counts(corpus_counts(system_b, gold, idx)).f05;
    if (fb >= fa) ++not_better;
  }
  return static_cast<double>(not_better) / static_cast<double>(resamples.size());
}

double bootstrap_significance(std::span<const std::vector<Edit>> system_a,
                              std::span<const std::vector<Edit>> system_b,
                              std::span<const GoldSets> gold,
                              std::size_t samples, std::uint64_t seed) {
  if (system_a.size() != system_b.size() || system_a.size() != gold.size()) {
    throw LengthMismatch("bootstrap corpora differ in sentence count");
  }
  if (samples < 1) throw std::invalid_argument("bootstrap needs at least one sample");
  const std::size_t n = system_a.size();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> resamples(samples, std::vector<std::size_t>(n));
  for (auto& r : resamples) {
    for (auto& i : r) i = static_cast<std::size_t>(rng() % n);
  }
  return bootstrap_from_resamples(system_a, system_b, gold, resamples);
}

WilliamsResult williams_test(double r12, double r13, double r23, int n) {
  if (n < 4) throw DomainError("Williams' test needs n >= 4");
  for (double r : {r12, r13, r23}) {
    if (!(std::abs(r) <= 1.0)) throw DomainError("correlations must lie in [-1, 1]");
  }
  const double det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
  if (det <= 0.0) throw DomainError("correlation matrix is not positive definite");
  const double nn = n;
  const double rbar = (r12 + r13) / 2.0;
  const double denom = 2.0 * (nn - 1.0) / (nn - 3.0) * det +
                       rbar * rbar * std::pow(1.0 - r23, 3.0);
  WilliamsResult out;
  out.t = (r12 - r13) * std::sqrt((nn - 1.0) * (1.0 + r23) / denom);
  out.dof = n - 3;
  boost::math::students_t dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DegenerateInput("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

FluencyReport fluency_report(std::span<const TokenSeq> corrections,
                             const NgramModel* lm) {
  if (lm == nullptr || lm->empty()) throw ModelNotLoaded("fluency needs a language model");
  FluencyReport report;
  report.perplexities.reserve(corrections.size());
  for (const auto& s : corrections) report.perplexities.push_back(lm->perplexity(s));
  report.median_perplexity = median(report.perplexities);
  return report;
}

}  // namespace qecomb
