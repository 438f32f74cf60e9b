#include "qecomb/token_labeler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "qecomb/errors.hpp"

namespace qecomb {

namespace {

using nlohmann::json;

constexpr double kLogProbScale = 0.1;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool capitalized(const std::string& t) {
  return !t.empty() && std::isupper(static_cast<unsigned char>(t[0])) != 0;
}

int frequency_bucket(std::uint64_t count) {
  if (count == 0) return 0;
  if (count < 5) return 1;
  if (count < 50) return 2;
  return 3;
}

json config_to_json(const TrainConfig& c) {
  return json{{"gamma", c.gamma},         {"mu", c.mu},
              {"sigma", c.sigma},         {"z", c.z},
              {"group_size", c.group_size}, {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
              {"seed", c.seed},           {"prob_floor", c.prob_floor}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.gamma = j.at("gamma").get<double>();
  c.mu = j.at("mu").get<double>();
  c.sigma = j.at("sigma").get<double>();
  c.z = j.at("z").get<double>();
  c.group_size = j.at("group_size").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.prob_floor = j.at("prob_floor").get<double>();
  return c;
}

}  // namespace

TokenLabeler::TokenLabeler(std::shared_ptr<const NgramModel> lm)
    : lm_(std::move(lm)),
      word_weights_(word_feature_names().size(), 0.0),
      gap_weights_(gap_feature_names().size(), 0.0) {}

const std::vector<std::string>& TokenLabeler::word_feature_names() {
  static const std::vector<std::string> names = {
      "bias",      "lm_logprob",  "lm_next_logprob", "freq_unseen",
      "freq_rare", "freq_mid",    "freq_common",     "introduced",
      "capitalized_inner",        "punct"};
  return names;
}

const std::vector<std::string>& TokenLabeler::gap_feature_names() {
  static const std::vector<std::string> names = {
      "bias",       "lm_next_logprob", "prev_introduced", "next_introduced",
      "prev_punct", "next_punct",      "deletion_site",   "boundary"};
  return names;
}

LabelFeatures TokenLabeler::featurize(const TokenSeq& source,
                                      const TokenSeq& hypothesis) const {
  const std::size_t m = hypothesis.size();
  std::vector<double> lps(m + 1, 0.0);
  if (lm_ && !lm_->empty()) lps = lm_->sentence_log_probs(hypothesis);

  std::vector<bool> introduced(m, false);
  std::vector<bool> deletion_site(m + 1, false);
  std::ptrdiff_t offset = 0;
  for (const auto& e : extract_edits(source, hypothesis)) {
    const auto hyp_start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(e.start) + offset);
    for (std::size_t t = 0; t < e.replacement.size(); ++t) introduced[hyp_start + t] = true;
    if (e.is_deletion()) deletion_site[hyp_start] = true;
    offset += static_cast<std::ptrdiff_t>(e.replacement.size()) -
              static_cast<std::ptrdiff_t>(e.end - e.start);
  }

  LabelFeatures f;
  f.words.rows = m;
  f.words.cols = word_feature_names().size();
  f.words.values.assign(f.words.rows * f.words.cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = f.words.values.data() + i * f.words.cols;
    row[0] = 1.0;
    row[1] = kLogProbScale * lps[i];
    row[2] = kLogProbScale * lps[i + 1];
    const std::uint64_t count = lm_ ? lm_->unigram_count(hypothesis[i]) : 0;
    row[3 + frequency_bucket(count)] = 1.0;
    row[7] = introduced[i] ? 1.0 : 0.0;
    row[8] = (i > 0 && capitalized(hypothesis[i])) ? 1.0 : 0.0;
    row[9] = is_punct_token(hypothesis[i]) ? 1.0 : 0.0;
  }

  f.gaps.rows = m + 1;
  f.gaps.cols = gap_feature_names().size();
  f.gaps.values.assign(f.gaps.rows * f.gaps.cols, 0.0);
  for (std::size_t j = 0; j <= m; ++j) {
    double* row = f.gaps.values.data() + j * f.gaps.cols;
    row[0] = 1.0;
    row[1] = kLogProbScale * lps[j];
    row[2] = (j > 0 && introduced[j - 1]) ? 1.0 : 0.0;
    row[3] = (j < m && introduced[j]) ? 1.0 : 0.0;
    row[4] = (j > 0 && is_punct_token(hypothesis[j - 1])) ? 1.0 : 0.0;
    row[5] = (j < m && is_punct_token(hypothesis[j])) ? 1.0 : 0.0;
    row[6] = deletion_site[j] ? 1.0 : 0.0;
    row[7] = (j == 0 || j == m) ? 1.0 : 0.0;
  }
  return f;
}

LabelVector TokenLabeler::predict(const LabelFeatures& features) const {
  LabelVector l;
  l.words.reserve(features.words.rows);
  for (std::size_t i = 0; i < features.words.rows; ++i) {
    l.words.push_back(sigmoid(dot(word_weights_, features.words.row(i))));
  }
  l.gaps.reserve(features.gaps.rows);
  for (std::size_t j = 0; j < features.gaps.rows; ++j) {
    l.gaps.push_back(sigmoid(dot(gap_weights_, features.gaps.row(j))));
  }
  return l;
}

LabelVector TokenLabeler::predict(const TokenSeq& source,
                                  const TokenSeq& hypothesis) const {
  return predict(featurize(source, hypothesis));
}

std::vector<LabelVector> TokenLabeler::label_batch(
    const TokenSeq& source, std::span<const TokenSeq> hypotheses) const {
  std::vector<LabelVector> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) out.push_back(predict(source, h));
  return out;
}

std::size_t TokenLabeler::num_parameters() const {
  return word_weights_.size() + gap_weights_.size();
}

std::vector<double> TokenLabeler::parameters() const {
  std::vector<double> p(word_weights_);
  p.insert(p.end(), gap_weights_.begin(), gap_weights_.end());
  return p;
}

void TokenLabeler::set_parameters(std::span<const double> params) {
  if (params.size() != num_parameters()) {
    throw ShapeMismatch("labeler expects " + std::to_string(num_parameters()) + " parameters");
  }
  const auto nw = word_weights_.size();
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(nw), word_weights_.begin());
  std::copy(params.begin() + static_cast<std::ptrdiff_t>(nw), params.end(), gap_weights_.begin());
}

void TokenLabeler::save_file(const std::string& path) const {
  json j;
  j["format"] = "qecomb-token-labeler";
  j["version"] = kFormatVersion;
  j["word_features"] = word_feature_names();
  j["gap_features"] = gap_feature_names();
  j["word_weights"] = word_weights_;
  j["gap_weights"] = gap_weights_;
  j["config"] = config_to_json(config_);
  if (lm_) {
    j["lm"] = json{{"order", lm_->order()}, {"vocab_size", lm_->vocab_size()}};
  } else {
    j["lm"] = nullptr;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

TokenLabeler TokenLabeler::load_file(const std::string& path,
                                     std::shared_ptr<const NgramModel> lm) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(0, path + ": " + e.what());
  }
  if (j.value("format", "") != "qecomb-token-labeler") {
    throw SchemaMismatch(path + " is not a token labeler artifact");
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw SchemaMismatch(path + ": unsupported labeler version");
  }
  if (j.at("word_features").get<std::vector<std::string>>() != word_feature_names() ||
      j.at("gap_features").get<std::vector<std::string>>() != gap_feature_names()) {
    throw SchemaMismatch(path + ": feature schema differs from this build");
  }
  const auto& lm_info = j.at("lm");
  if (!lm_info.is_null()) {
    if (!lm) throw ModelNotLoaded(path + " was trained with a language model; none given");
    if (lm_info.at("order").get<int>() != lm->order() ||
        lm_info.at("vocab_size").get<std::size_t>() != lm->vocab_size()) {
      throw SchemaMismatch(path + ": language model differs from the one used in training");
    }
  }
  TokenLabeler labeler(lm_info.is_null() ? nullptr : std::move(lm));
  labeler.word_weights_ = j.at("word_weights").get<std::vector<double>>();
  labeler.gap_weights_ = j.at("gap_weights").get<std::vector<double>>();
  if (labeler.word_weights_.size() != word_feature_names().size() ||
      labeler.gap_weights_.size() != gap_feature_names().size()) {
    throw SchemaMismatch(path + ": weight vector sizes do not match the schema");
  }
  labeler.config_ = config_from_json(j.at("config"));
  return labeler;
}

std::vector<FeaturizedGroup> featurize_groups(const TokenLabeler& labeler,
                                              std::span<const RankedGroup> groups) {
  std::vector<FeaturizedGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    FeaturizedGroup fg;
    fg.group = &g;
    for (const auto& m : g.members) fg.features.push_back(labeler.featurize(m.source, m.hypothesis));
    out.push_back(std::move(fg));
  }
  return out;
}

LossTerms labeler_loss(const TokenLabeler& labeler,
                       std::span<const FeaturizedGroup> groups,
                       const TrainConfig& config, std::vector<double>* grad) {
  std::vector<RankedGroup> plain;
  std::vector<std::vector<InstancePrediction>> preds;
  plain.reserve(groups.size());
  preds.reserve(groups.size());
  for (const auto& fg : groups) {
    plain.push_back(*fg.group);
    auto& gp = preds.emplace_back();
    for (const auto& f : fg.features) {
      InstancePrediction p;
      p.pred = labeler.predict(f);
      p.q = aggregate_q(p.pred, config.prob_floor);
      gp.push_back(std::move(p));
    }
  }
  std::vector<std::vector<InstanceGradient>> igrads;
  const auto terms = total_loss(plain, preds, config, grad ? &igrads : nullptr);
  if (!grad) return terms;

  const std::size_t nw = TokenLabeler::word_feature_names().size();
  grad->assign(labeler.num_parameters(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < groups[g].features.size(); ++i) {
      const auto& f = groups[g].features[i];
      const auto& p = preds[g][i];
      const auto& ig = igrads[g][i];
      const double m2p1 = static_cast<double>(p.pred.words.size() + p.pred.gaps.size());
      const double dq_scale = ig.d_q * p.q / m2p1;
      // d log(w)/dz = 1 - w for a sigmoid output.
      for (std::size_t r = 0; r < f.words.rows; ++r) {
        const double w = p.pred.words[r];
        double dz = ig.d_words[r] * w * (1.0 - w);
        if (w >= config.prob_floor) dz += dq_scale * (1.0 - w);
        const auto x = f.words.row(r);
        for (std::size_t c = 0; c < nw; ++c) (*grad)[c] += dz * x[c];
      }
      for (std::size_t r = 0; r < f.gaps.rows; ++r) {
        const double gv = p.pred.gaps[r];
        double dz = ig.d_gaps[r] * gv * (1.0 - gv);
        if (gv >= config.prob_floor) dz += dq_scale * (1.0 - gv);
        const auto x = f.gaps.row(r);
        for (std::size_t c = 0; c < x.size(); ++c) (*grad)[nw + c] += dz * x[c];
      }
    }
  }
  return terms;
}

TokenLabeler train_token_labeler(std::span<const RankedGroup> groups,
                                 std::shared_ptr<const NgramModel> lm,
                                 const TrainConfig& config, TrainingLog* log) {
  config.validate();
  std::size_t instances = 0;
  for (const auto& g : groups) instances += g.members.size();
  if (instances == 0) throw EmptyCorpus("no training hypotheses left after filtering");

  TokenLabeler labeler(std::move(lm));
  labeler.config() = config;
  const auto featurized = featurize_groups(labeler, groups);

  if (log) {
    log->epoch_loss.clear();
    log->epoch_loss.push_back(labeler_loss(labeler, featurized, config).total);
  }

  const std::size_t groups_per_batch = static_cast<std::size_t>(
      std::max(1, config.batch_size / config.group_size));
  std::vector<std::size_t> order(featurized.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  std::vector<double> params = labeler.parameters();
  std::vector<double> grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += groups_per_batch) {
      std::vector<FeaturizedGroup> batch;
      for (std::size_t k = start; k < std::min(order.size(), start + groups_per_batch); ++k) {
        batch.push_back(featurized[order[k]]);
      }
      labeler_loss(labeler, batch, config, &grad);
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= config.learning_rate * grad[p];
      labeler.set_parameters(params);
    }
    if (log) log->epoch_loss.push_back(labeler_loss(labeler, featurized, config).total);
  }
  return labeler;
}

}  // namespace qecomb
