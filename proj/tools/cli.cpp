#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qecomb/combine.hpp"
#include "qecomb/edit_classifier.hpp"
#include "qecomb/errors.hpp"
#include "qecomb/eval.hpp"
#include "qecomb/external_scorer.hpp"
#include "qecomb/m2.hpp"
#include "qecomb/ngram_lm.hpp"
#include "qecomb/parallel.hpp"
#include "qecomb/report.hpp"
#include "qecomb/scorers.hpp"
#include "qecomb/token_labeler.hpp"

namespace qecomb::cli {

namespace {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// file helpers

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("error while reading " + path);
  return lines;
}

std::vector<TokenSeq> read_corpus(const std::string& path) {
  std::vector<TokenSeq> out;
  for (const auto& l : read_lines(path)) out.push_back(tokenize(l));
  return out;
}

void require_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
}

std::vector<M2Block> read_m2(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return parse_m2(in);
  } catch (const FormatError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Writes to `path` or, when empty, to `fallback`.
void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  fn(f);
  f.flush();
  if (!f) throw IoError("error while writing " + path);
}

void check_aligned(const std::string& name, std::size_t got, std::size_t want) {
  if (got == want) return;
  throw ConfigError(name + " has " + std::to_string(got) + " lines but " + std::to_string(want) +
                    " were expected; first unmatched line is " +
                    std::to_string(std::min(got, want) + 1));
}

// The lowest-numbered annotator's edits.
std::vector<Edit> first_annotator(const M2Block& block) {
  const auto gold = gold_edits(block);
  return gold.empty() ? std::vector<Edit>{} : gold.begin()->second;
}

// "ID=PATH" or "PATH" (id = file stem).
std::vector<SystemOutput> load_systems(const std::vector<std::string>& specs,
                                       std::size_t expected, const std::string& what) {
  std::vector<SystemOutput> out;
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    SystemOutput s;
    std::string path;
    if (eq == std::string::npos) {
      path = spec;
      s.id = std::filesystem::path(spec).stem().string();
    } else {
      s.id = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    }
    if (s.id.empty()) throw ConfigError("empty system id in '" + spec + "'");
    if (!seen.insert(s.id).second) throw ConfigError("duplicate system id '" + s.id + "'");
    s.hypotheses = read_corpus(path);
    check_aligned(what + " " + path, s.hypotheses.size(), expected);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> roster_of(const std::vector<SystemOutput>& systems) {
  std::vector<std::string> ids;
  for (const auto& s : systems) ids.push_back(s.id);
  return ids;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// options

struct Common {
  std::uint64_t seed = 13;
  int workers = 1;
  bool json = false;
  bool dump_config = false;
};

struct ScorerOptions {
  std::string scorer = "ngram";
  std::string lm;
  std::string labeler;
  std::string gold;
  std::string endpoint;
};

void add_scorer_options(CLI::App* app, ScorerOptions& o) {
  app->add_option("--scorer", o.scorer, "Quality scorer")
      ->check(CLI::IsMember({"uniform", "ngram", "labeler", "oracle", "external"}))
      ->capture_default_str();
  app->add_option("--lm", o.lm, "n-gram model (ngram scorer, labeler features)");
  app->add_option("--labeler", o.labeler, "Trained token labeler (labeler scorer)");
  app->add_option("--scorer-gold", o.gold, "M2 references for the oracle scorer");
  app->add_option("--endpoint", o.endpoint,
                  "External scorer: tcp:HOST:PORT or stdio:COMMAND");
}

std::shared_ptr<const NgramModel> load_lm(const std::string& path) {
  require_file(path);
  return std::make_shared<const NgramModel>(NgramModel::load_file(path));
}

std::unique_ptr<Scorer> make_scorer(const ScorerOptions& o) {
  if (o.scorer == "uniform") return std::make_unique<UniformScorer>();
  if (o.scorer == "ngram") {
    if (o.lm.empty()) throw ConfigError("--scorer ngram needs --lm");
    return std::make_unique<NgramScorer>(load_lm(o.lm));
  }
  if (o.scorer == "labeler") {
    if (o.labeler.empty()) throw ConfigError("--scorer labeler needs --labeler");
    require_file(o.labeler);
    auto lm = o.lm.empty() ? nullptr : load_lm(o.lm);
    return std::make_unique<TokenLabeler>(TokenLabeler::load_file(o.labeler, lm));
  }
  if (o.scorer == "oracle") {
    if (o.gold.empty()) throw ConfigError("--scorer oracle needs --scorer-gold");
    auto scorer = std::make_unique<ReferenceOracleScorer>();
    for (const auto& b : read_m2(o.gold)) {
      scorer->add(b.source, apply_edits(b.source, first_annotator(b)));
    }
    return scorer;
  }
  const auto endpoint = resolve_scorer_endpoint(o.endpoint);
  if (endpoint.empty()) {
    throw ConfigError(std::string("--scorer external needs --endpoint or ") + kScorerEndpointEnv);
  }
  return std::make_unique<ExternalScorer>(endpoint);
}

// ---------------------------------------------------------------------------
// commands

struct ExtractOptions {
  std::string source;
  std::string hypothesis;
  std::string output;
};

int cmd_extract(const ExtractOptions& o, const Common& c, std::ostream& out) {
  const auto src = read_corpus(o.source);
  const auto hyp = read_corpus(o.hypothesis);
  check_aligned("hypothesis " + o.hypothesis, hyp.size(), src.size());
  std::size_t edits = 0;
  std::vector<M2Block> blocks;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto e = extract_edits(src[i], hyp[i]);
    edits += e.size();
    blocks.push_back(make_m2_block(src[i], e));
  }
  if (c.json && o.output.empty()) {
    std::ostringstream m2;
    emit_m2(m2, blocks);
    out << json{{"sentences", src.size()}, {"edits", edits}, {"m2", m2.str()}}.dump() << '\n';
    return kOk;
  }
  with_output(o.output, out, [&](std::ostream& os) { emit_m2(os, blocks); });
  if (c.json) out << json{{"sentences", src.size()}, {"edits", edits}}.dump() << '\n';
  return kOk;
}

struct CombineOptions {
  std::string source;
  std::vector<std::string> systems;
  ScorerOptions scorer;
  CombinerConfig config;
  std::string classifier;
  std::string output;
  std::string report;
};

int cmd_combine(CombineOptions o, const Common& c, std::ostream& out, std::ostream& err) {
  try {
    o.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.config.beta > 0.0 && o.classifier.empty()) {
    throw ConfigError("--beta > 0 weights the edit score, which needs a trained edit "
                      "classifier (--classifier); train one with train-esc or use --beta 0");
  }
  const auto sources = read_corpus(o.source);
  const auto systems = load_systems(o.systems, sources.size(), "system");
  if (systems.empty()) throw ConfigError("combine needs at least one --system");

  std::unique_ptr<EditClassifier> classifier;
  if (!o.classifier.empty()) {
    require_file(o.classifier);
    classifier = std::make_unique<EditClassifier>(EditClassifier::load_file(o.classifier));
    if (classifier->roster() != roster_of(systems)) {
      err << "warning: edit classifier roster differs from the given systems; "
             "ignoring it and using beta = 0\n";
      classifier.reset();
      o.config.beta = 0.0;
    }
  }
  const auto scorer = make_scorer(o.scorer);
  const auto results = combine_corpus(sources, systems, *scorer, o.config,
                                      classifier.get(), c.workers);

  std::size_t changed = 0, applied = 0, union_edits = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    changed += results[i].best.realized != sources[i] ? 1 : 0;
    applied += results[i].best.applied.size();
    union_edits += results[i].edit_union.size();
  }
  if (!o.report.empty()) {
    with_output(o.report, out, [&](std::ostream& os) {
      for (std::size_t i = 0; i < results.size(); ++i) {
        os << combination_record(i, results[i]) << '\n';
      }
    });
  }
  json summary = {{"sentences", results.size()},
                  {"changed", changed},
                  {"union_edits", union_edits},
                  {"applied_edits", applied}};
  if (c.json && o.output.empty()) {
    json lines = json::array();
    for (const auto& r : results) lines.push_back(join(r.best.realized));
    summary["corrections"] = std::move(lines);
  } else {
    with_output(o.output, out, [&](std::ostream& os) {
      for (const auto& r : results) os << join(r.best.realized) << '\n';
    });
  }
  if (c.json) out << summary.dump() << '\n';
  return kOk;
}

struct RerankOptions {
  std::string source;
  std::vector<std::string> systems;
  ScorerOptions scorer;
  std::string output;
};

int cmd_rerank(const RerankOptions& o, const Common& c, std::ostream& out) {
  const auto sources = read_corpus(o.source);
  const auto systems = load_systems(o.systems, sources.size(), "system");
  if (systems.empty()) throw ConfigError("rerank needs at least one --system");
  const auto scorer = make_scorer(o.scorer);
  const auto picks = parallel_map(sources.size(), c.workers, [&](std::size_t i) {
    std::vector<TokenSeq> hyps;
    for (const auto& s : systems) hyps.push_back(s.hypotheses[i]);
    return rerank(sources[i], hyps, *scorer);
  });
  std::map<std::string, std::size_t> chosen;
  for (const auto& p : picks) {
    chosen[p.index < systems.size() ? systems[p.index].id : "source"] += 1;
  }
  json summary = {{"sentences", picks.size()}, {"chosen", chosen}};
  if (c.json && o.output.empty()) {
    json lines = json::array();
    for (const auto& p : picks) lines.push_back(join(p.hypothesis));
    summary["corrections"] = std::move(lines);
  } else {
    with_output(o.output, out, [&](std::ostream& os) {
      for (const auto& p : picks) os << join(p.hypothesis) << '\n';
    });
  }
  if (c.json) out << summary.dump() << '\n';
  return kOk;
}

struct EvaluateOptions {
  std::string gold;
  std::vector<std::string> hypotheses;
  std::size_t bootstrap = 0;
};

int cmd_evaluate(const EvaluateOptions& o, const Common& c, std::ostream& out) {
  const auto blocks = read_m2(o.gold);
  std::vector<GoldSets> gold;
  for (const auto& b : blocks) gold.push_back(gold_edits(b));
  const auto systems = load_systems(o.hypotheses, blocks.size(), "hypothesis");
  if (systems.empty()) throw ConfigError("evaluate needs at least one --hypothesis");

  std::vector<std::vector<std::vector<Edit>>> edits(systems.size());
  std::vector<NamedScore> rows;
  for (std::size_t s = 0; s < systems.size(); ++s) {
    edits[s] = parallel_map(blocks.size(), c.workers, [&](std::size_t i) {
      return extract_edits(blocks[i].source, systems[s].hypotheses[i]);
    });
    rows.push_back({systems[s].id, corpus_f05(edits[s], gold)});
  }
  std::vector<double> p_values;
  if (o.bootstrap > 0) {
    for (std::size_t s = 1; s < systems.size(); ++s) {
      p_values.push_back(bootstrap_significance(edits[0], edits[s], gold, o.bootstrap, c.seed));
    }
  }
  if (c.json) {
    for (std::size_t s = 0; s < rows.size(); ++s) {
      json j = {{"system", rows[s].name}};
      const json score = json::parse(score_json(rows[s].score));
      for (const auto& [k, v] : score.items()) j[k] = v;
      if (s > 0 && !p_values.empty()) j["bootstrap_p"] = p_values[s - 1];
      out << j.dump() << '\n';
    }
    return kOk;
  }
  out << score_table(rows);
  for (std::size_t s = 1; s <= p_values.size(); ++s) {
    out << "bootstrap p(" << systems[s].id << " >= " << systems[0].id
        << ") = " << fixed(p_values[s - 1]) << '\n';
  }
  return kOk;
}

struct OracleOptions {
  std::string gold;
  std::vector<std::string> systems;
  std::string output;
};

int cmd_oracle(const OracleOptions& o, const Common& c, std::ostream& out) {
  const auto blocks = read_m2(o.gold);
  const auto systems = load_systems(o.systems, blocks.size(), "system");
  if (systems.empty()) throw ConfigError("oracle needs at least one --system");
  struct Row {
    TokenSeq realized;
    std::vector<Edit> edits;
    GoldSets gold;
  };
  const auto rows = parallel_map(blocks.size(), c.workers, [&](std::size_t i) {
    const auto u = build_union(blocks[i].source, systems, i);
    const auto g = gold_edits(blocks[i]);
    const auto& [id, edits] = *g.begin();
    const auto cand = oracle_combine(u, edits);
    return Row{cand.realized, cand.applied_edits(u), GoldSets{{id, edits}}};
  });
  std::vector<std::vector<Edit>> hyp;
  std::vector<GoldSets> gold;
  for (const auto& r : rows) {
    hyp.push_back(r.edits);
    gold.push_back(r.gold);
  }
  const auto score = corpus_f05(hyp, gold);
  if (!o.output.empty()) {
    with_output(o.output, out, [&](std::ostream& os) {
      for (const auto& r : rows) os << join(r.realized) << '\n';
    });
  }
  if (c.json) {
    out << score_json(score) << '\n';
  } else {
    const std::vector<NamedScore> table = {{"oracle", score}};
    out << score_table(table);
  }
  return kOk;
}

struct LmOptions {
  std::vector<std::string> corpora;
  int order = 3;
  double k = 0.1;
  std::string output;
};

int cmd_lm_train(const LmOptions& o, const Common& c, std::ostream& out) {
  std::vector<TokenSeq> corpus;
  for (const auto& p : o.corpora) {
    auto part = read_corpus(p);
    corpus.insert(corpus.end(), part.begin(), part.end());
  }
  NgramModel lm(1);
  try {
    lm = NgramModel::train(corpus, o.order, o.k);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  try {
    lm.save_file(o.output);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  const json j = {{"sentences", corpus.size()}, {"order", lm.order()},
                  {"k", lm.k()}, {"vocab_size", lm.vocab_size()}};
  if (c.json) {
    out << j.dump() << '\n';
  } else {
    out << "trained order-" << lm.order() << " model on " << corpus.size()
        << " sentences, vocabulary " << lm.vocab_size() << '\n';
  }
  return kOk;
}

struct TrainQeOptions {
  std::string gold;
  std::vector<std::string> systems;
  std::string lm;
  std::string output;
  TrainConfig config;
};

int cmd_train_qe(TrainQeOptions o, const Common& c, std::ostream& out) {
  o.config.seed = c.seed;
  try {
    o.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto blocks = read_m2(o.gold);
  const auto systems = load_systems(o.systems, blocks.size(), "system");
  std::vector<TrainingHypothesis> data;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto ref = apply_edits(blocks[i].source, first_annotator(blocks[i]));
    for (const auto& s : systems) data.push_back({i, blocks[i].source, s.hypotheses[i], ref});
  }
  const auto groups = build_groups(data, o.config);
  auto lm = o.lm.empty() ? nullptr : load_lm(o.lm);
  TrainingLog log;
  const auto labeler = train_token_labeler(groups, lm, o.config, &log);
  try {
    labeler.save_file(o.output);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  std::size_t instances = 0;
  for (const auto& g : groups) instances += g.members.size();
  if (c.json) {
    out << json{{"groups", groups.size()}, {"instances", instances},
                {"epoch_loss", log.epoch_loss}}.dump() << '\n';
  } else {
    out << groups.size() << " groups, " << instances << " hypotheses\n";
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
      out << "epoch " << e << "  loss " << fixed(log.epoch_loss[e], 6) << '\n';
    }
  }
  return kOk;
}

struct TrainEscOptions {
  std::string gold;
  std::vector<std::string> systems;
  std::string output;
  EditClassifierConfig config;
};

int cmd_train_esc(const TrainEscOptions& o, const Common& c, std::ostream& out) {
  try {
    o.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto blocks = read_m2(o.gold);
  const auto systems = load_systems(o.systems, blocks.size(), "system");
  if (systems.empty()) throw ConfigError("train-esc needs at least one --system");
  std::vector<LabeledEdit> data;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto u = build_union(blocks[i].source, systems, i);
    for (auto& d : label_union(u, first_annotator(blocks[i]))) data.push_back(std::move(d));
  }
  const auto model = train_edit_classifier(data, roster_of(systems), o.config);
  try {
    model.save_file(o.output);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  const auto positives = static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](const LabeledEdit& d) { return d.correct; }));
  const double loss = edit_classifier_loss(model, data);
  if (c.json) {
    out << json{{"edits", data.size()}, {"positives", positives}, {"loss", loss},
                {"roster", model.roster()}}.dump() << '\n';
  } else {
    out << data.size() << " union edits, " << positives << " correct; final loss "
        << fixed(loss, 6) << '\n';
  }
  return kOk;
}

struct CorrelateOptions {
  std::string reference;
  std::string scores;
  std::string scores_b;
};

std::vector<double> read_numbers(const std::string& path) {
  std::vector<double> v;
  std::size_t lineno = 0;
  for (const auto& l : read_lines(path)) {
    ++lineno;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(l, &used));
      if (l.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(l);
    } catch (const std::exception&) {
      throw ConfigError(path + ": line " + std::to_string(lineno) + " is not a number");
    }
  }
  return v;
}

int cmd_correlate(const CorrelateOptions& o, const Common& c, std::ostream& out) {
  const auto ref = read_numbers(o.reference);
  const auto a = read_numbers(o.scores);
  check_aligned("scores " + o.scores, a.size(), ref.size());
  json j = {{"n", ref.size()}, {"spearman", spearman(ref, a)}};
  if (!o.scores_b.empty()) {
    const auto b = read_numbers(o.scores_b);
    check_aligned("scores " + o.scores_b, b.size(), ref.size());
    const double r12 = j["spearman"].get<double>();
    const double r13 = spearman(ref, b);
    const double r23 = spearman(a, b);
    const auto w = williams_test(r12, r13, r23, static_cast<int>(ref.size()));
    j["spearman_b"] = r13;
    j["spearman_ab"] = r23;
    j["williams_t"] = w.t;
    j["williams_dof"] = w.dof;
    j["williams_p"] = w.p_value;
  }
  if (c.json) {
    out << j.dump() << '\n';
    return kOk;
  }
  out << "n " << ref.size() << "\nspearman " << fixed(j["spearman"].get<double>()) << '\n';
  if (j.contains("williams_t")) {
    out << "spearman_b " << fixed(j["spearman_b"].get<double>()) << "\nwilliams t "
        << fixed(j["williams_t"].get<double>()) << " (dof " << j["williams_dof"].get<int>()
        << ", one-sided p " << fixed(j["williams_p"].get<double>()) << ")\n";
  }
  return kOk;
}

struct FluencyOptions {
  std::string lm;
  std::string input;
};

int cmd_fluency(const FluencyOptions& o, const Common& c, std::ostream& out) {
  const auto lm = load_lm(o.lm);
  const auto corpus = read_corpus(o.input);
  if (corpus.empty()) throw ConfigError(o.input + " is empty");
  const auto r = fluency_report(corpus, lm.get());
  if (c.json) {
    out << json{{"sentences", corpus.size()}, {"median_perplexity", r.median_perplexity}}.dump()
        << '\n';
  } else {
    out << "median perplexity " << fixed(r.median_perplexity) << " over " << corpus.size()
        << " sentences\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quality-estimation based combination of grammatical error correction outputs",
               "qecomb"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI file with option values; flags given on the command line win");

  Common common;
  app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", common.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--json", common.json, "Machine-readable output");
  app.add_flag("--dump-config", common.dump_config,
               "Print the effective configuration as INI and exit")
      ->configurable(false);

  ExtractOptions extract;
  auto* ex = app.add_subcommand("extract-edits", "Align source and hypothesis; emit M2");
  ex->add_option("--source", extract.source)->required();
  ex->add_option("--hypothesis", extract.hypothesis)->required();
  ex->add_option("--output", extract.output, "M2 output (default stdout)");

  CombineOptions combine;
  auto* cb = app.add_subcommand("combine", "Beam-search combination of system outputs");
  cb->add_option("--source", combine.source)->required();
  cb->add_option("--system", combine.systems, "Base system output, ID=PATH or PATH")->required();
  add_scorer_options(cb, combine.scorer);
  cb->add_option("--alpha", combine.config.alpha, "Voting bias exponent")->capture_default_str();
  cb->add_option("--beta", combine.config.beta, "Edit score weight")->capture_default_str();
  cb->add_option("--beam-size", combine.config.beam_size)->capture_default_str();
  cb->add_option("--classifier", combine.classifier, "Trained edit classifier");
  cb->add_option("--output", combine.output, "Corrections (default stdout)");
  cb->add_option("--report", combine.report, "Per-sentence JSONL debug report");

  RerankOptions rr;
  auto* rk = app.add_subcommand("rerank", "Pick the best-scoring hypothesis per sentence");
  rk->add_option("--source", rr.source)->required();
  rk->add_option("--system", rr.systems, "Hypothesis file, ID=PATH or PATH")->required();
  add_scorer_options(rk, rr.scorer);
  rk->add_option("--output", rr.output);

  EvaluateOptions ev;
  auto* evc = app.add_subcommand("evaluate", "Corpus F0.5 against M2 gold");
  evc->add_option("--gold", ev.gold)->required();
  evc->add_option("--hypothesis", ev.hypotheses, "Hypothesis file, ID=PATH or PATH")->required();
  evc->add_option("--bootstrap", ev.bootstrap,
                  "Resamples for significance of the first system over each other one")
      ->capture_default_str();

  OracleOptions orc;
  auto* oc = app.add_subcommand("oracle", "Apply union edits that are gold");
  oc->add_option("--gold", orc.gold)->required();
  oc->add_option("--system", orc.systems)->required();
  oc->add_option("--output", orc.output);

  LmOptions lmo;
  auto* lmc = app.add_subcommand("lm-train", "Train an add-k n-gram model");
  lmc->add_option("--corpus", lmo.corpora)->required();
  lmc->add_option("--order", lmo.order)->capture_default_str();
  lmc->add_option("--k", lmo.k)->capture_default_str();
  lmc->add_option("--output", lmo.output)->required();

  TrainQeOptions tq;
  auto* tqc = app.add_subcommand("train-qe", "Train the token labeler");
  tqc->add_option("--gold", tq.gold, "M2 with sources and references")->required();
  tqc->add_option("--system", tq.systems, "Training hypotheses, ID=PATH or PATH")->required();
  tqc->add_option("--lm", tq.lm);
  tqc->add_option("--output", tq.output)->required();
  tqc->add_option("--gamma", tq.config.gamma)->capture_default_str();
  tqc->add_option("--mu", tq.config.mu)->capture_default_str();
  tqc->add_option("--sigma", tq.config.sigma)->capture_default_str();
  tqc->add_option("--z", tq.config.z)->capture_default_str();
  tqc->add_option("--group-size", tq.config.group_size)->capture_default_str();
  tqc->add_option("--batch-size", tq.config.batch_size)->capture_default_str();
  tqc->add_option("--learning-rate", tq.config.learning_rate)->capture_default_str();
  tqc->add_option("--epochs", tq.config.epochs)->capture_default_str();

  TrainEscOptions te;
  auto* tec = app.add_subcommand("train-esc", "Train the edit classifier");
  tec->add_option("--gold", te.gold)->required();
  tec->add_option("--system", te.systems)->required();
  tec->add_option("--output", te.output)->required();
  tec->add_option("--learning-rate", te.config.learning_rate)->capture_default_str();
  tec->add_option("--epochs", te.config.epochs)->capture_default_str();
  tec->add_option("--l2", te.config.l2)->capture_default_str();

  CorrelateOptions co;
  auto* cc = app.add_subcommand("correlate", "Spearman correlation and Williams' test");
  cc->add_option("--reference", co.reference, "Reference scores, one per line")->required();
  cc->add_option("--scores", co.scores)->required();
  cc->add_option("--scores-b", co.scores_b, "Second metric for Williams' test");

  FluencyOptions fl;
  auto* fc = app.add_subcommand("fluency", "Median perplexity of a corpus");
  fc->add_option("--lm", fl.lm)->required();
  fc->add_option("--input", fl.input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (common.dump_config) {
    // Global keys plus the keys of the chosen command.
    const std::string active = app.get_subcommands().front()->get_name() + ".";
    std::istringstream all(app.config_to_str(true, false));
    for (std::string line; std::getline(all, line);) {
      const auto key = line.substr(0, line.find('='));
      if (key.find('.') == std::string::npos || key.rfind(active, 0) == 0) out << line << '\n';
    }
    return kOk;
  }

  try {
    if (ex->parsed()) return cmd_extract(extract, common, out);
    if (cb->parsed()) return cmd_combine(combine, common, out, err);
    if (rk->parsed()) return cmd_rerank(rr, common, out);
    if (evc->parsed()) return cmd_evaluate(ev, common, out);
    if (oc->parsed()) return cmd_oracle(orc, common, out);
    if (lmc->parsed()) return cmd_lm_train(lmo, common, out);
    if (tqc->parsed()) return cmd_train_qe(tq, common, out);
    if (tec->parsed()) return cmd_train_esc(te, common, out);
    if (cc->parsed()) return cmd_correlate(co, common, out);
    if (fc->parsed()) return cmd_fluency(fl, common, out);
  } catch (const ScorerError& e) {
    err << "error: scorer failure: " << e.what() << '\n';
    return kScorerFailure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace qecomb::cli
