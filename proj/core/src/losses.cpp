#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qecomb/errors.hpp"
#include "qecomb/training.hpp"

namespace qecomb {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(z >= 0.0)) throw std::invalid_argument("z must be >= 0");
  if (group_size < 1) throw std::invalid_argument("group size must be >= 1");
  if (batch_size < 1 || batch_size % group_size != 0) {
    throw std::invalid_argument("batch size must be a positive multiple of the group size");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
}

double bce_loss(std::span<const double> pred, std::span<const double> gold,
                std::span<const double> weights, double floor,
                std::vector<double>* grad) {
  if (pred.size() != gold.size() || (!weights.empty() && weights.size() != pred.size())) {
    throw ShapeMismatch("prediction, gold and weight vectors differ in length");
  }
  if (grad) grad->assign(pred.size(), 0.0);
  if (pred.empty()) return 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) wsum += weights.empty() ? 1.0 : weights[i];
  if (wsum <= 0.0) return 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double w = (weights.empty() ? 1.0 : weights[i]) / wsum;
    const double p = std::clamp(pred[i], floor, 1.0 - floor);
    const double y = gold[i];
    loss -= w * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    if (grad && pred[i] > floor && pred[i] < 1.0 - floor) {
      (*grad)[i] = w * (-y / p + (1.0 - y) / (1.0 - p));
    }
  }
  return loss;
}

double word_loss(std::span<const double> pred, std::span<const double> gold,
                 std::span<const double> weights, double floor,
                 std::vector<double>* grad) {
  return bce_loss(pred, gold, weights, floor, grad);
}

double gap_loss(std::span<const double> pred, std::span<const double> gold,
                std::span<const double> weights, double floor,
                std::vector<double>* grad) {
  return bce_loss(pred, gold, weights, floor, grad);
}

double rank_loss(std::span<const double> q, std::span<const double> f05,
                 double sigma, double mu, std::vector<double>* grad) {
  if (q.size() != f05.size()) throw ShapeMismatch("rank loss inputs differ in length");
  if (grad) grad->assign(q.size(), 0.0);
  const double scale = sigma * mu;
  double loss = 0.0;
  for (std::size_t v = 0; v < q.size(); ++v) {
    for (std::size_t u = 0; u < q.size(); ++u) {
      if (!(f05[v] > f05[u])) continue;
      const double margin = scale * (q[v] - q[u]);
      loss += softplus(-margin);
      if (grad) {
        // d/dmargin softplus(-margin) = -logistic(-margin)
        const double d = -scale * logistic(-margin);
        (*grad)[v] += d;
        (*grad)[u] -= d;
      }
    }
  }
  return loss;
}

std::size_t rank_pair_count(std::span<const double> f05) {
  std::size_t n = 0;
  for (double a : f05) {
    for (double b : f05) n += a > b ? 1 : 0;
  }
  return n;
}

LossTerms total_loss(std::span<const RankedGroup> groups,
                     std::span<const std::vector<InstancePrediction>> predictions,
                     const TrainConfig& config,
                     std::vector<std::vector<InstanceGradient>>* grads) {
  if (groups.size() != predictions.size()) {
    throw ShapeMismatch("predictions do not mirror groups");
  }
  std::size_t n = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].members.size() != predictions[g].size()) {
      throw ShapeMismatch("group " + std::to_string(g) + " prediction count differs");
    }
    n += groups[g].members.size();
  }
  LossTerms terms;
  if (grads) grads->assign(groups.size(), {});
  if (n == 0) return terms;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> gw, gg, gq;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g].members;
    const auto& preds = predictions[g];
    std::vector<double> qs, ys;
    if (grads) (*grads)[g].resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& m = members[i];
      const auto& p = preds[i];
      terms.word += inv_n * word_loss(p.pred.words, m.gold.words, m.word_weights,
                                      config.prob_floor, grads ? &gw : nullptr);
      terms.gap += inv_n * gap_loss(p.pred.gaps, m.gold.gaps, m.gap_weights,
                                    config.prob_floor, grads ? &gg : nullptr);
      if (grads) {
        auto& out = (*grads)[g][i];
        out.d_words.resize(gw.size());
        out.d_gaps.resize(gg.size());
        for (std::size_t k = 0; k < gw.size(); ++k) out.d_words[k] = inv_n * gw[k];
        for (std::size_t k = 0; k < gg.size(); ++k) out.d_gaps[k] = inv_n * gg[k];
      }
      qs.push_back(p.q);
      ys.push_back(m.f05);
    }
    terms.rank += rank_loss(qs, ys, config.sigma, config.mu, grads ? &gq : nullptr);
    if (grads) {
      for (std::size_t i = 0; i < members.size(); ++i) {
        (*grads)[g][i].d_q = config.gamma * gq[i];
      }
    }
  }
  terms.total = terms.word + terms.gap + config.gamma * terms.rank;
  return terms;
}

}  // namespace qecomb
