#include "helpers.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qecomb::testing {

namespace {

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

const std::vector<std::string> kVocab = {"a", "b", "c", "d", "e", "f", "g", "h",
                                         "i", "j", "k", "l", ",", "."};

}  // namespace

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("qecomb-test-" + std::to_string(rd()) + std::to_string(rd()));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_lines(const std::string& path, const std::vector<TokenSeq>& lines) {
  std::string text;
  for (const auto& l : lines) text += join(l) + '\n';
  write_file(path, text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> TableScorer::score_batch(const TokenSeq&,
                                             std::span<const TokenSeq> hypotheses) const {
  std::vector<double> out;
  for (const auto& h : hypotheses) {
    const auto it = table_.find(join(h));
    out.push_back(it == table_.end() ? fallback_ : it->second);
  }
  scored_ += hypotheses.size();
  return out;
}

std::vector<double> CountingScorer::score_batch(const TokenSeq& source,
                                                std::span<const TokenSeq> hypotheses) const {
  hypotheses_ += hypotheses.size();
  ++batches_;
  return inner_.score_batch(source, hypotheses);
}

double RandomBigramScorer::unit(const std::string& a, const std::string& b, char tag) const {
  const std::string key = a + '\x1f' + b + tag;
  return to_unit(mix(std::hash<std::string>{}(key) ^ mix(seed_)));
}

std::vector<LabelVector> RandomBigramScorer::label_batch(
    const TokenSeq&, std::span<const TokenSeq> hypotheses) const {
  std::vector<LabelVector> out;
  for (const auto& h : hypotheses) {
    LabelVector l;
    for (std::size_t i = 0; i < h.size(); ++i) {
      l.words.push_back(0.05 + 0.95 * unit(i ? h[i - 1] : "<s>", h[i], 'w'));
    }
    for (std::size_t j = 0; j <= h.size(); ++j) {
      l.gaps.push_back(0.05 + 0.95 * unit(j ? h[j - 1] : "<s>", j < h.size() ? h[j] : "</s>", 'g'));
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<double> RandomSentenceScorer::score_batch(
    const TokenSeq&, std::span<const TokenSeq> hypotheses) const {
  std::vector<double> out;
  for (const auto& h : hypotheses) {
    out.push_back(0.01 + 0.99 * to_unit(mix(std::hash<std::string>{}(join(h)) ^ mix(seed_))));
  }
  return out;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * to_unit(rng());
}

RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_edits) {
  RandomInstance inst;
  const std::size_t len = 6 + rng() % 15;
  for (std::size_t i = 0; i < len; ++i) inst.source.push_back(kVocab[rng() % kVocab.size()]);

  const std::size_t want = rng() % (max_edits + 1);
  constexpr int kSystems = 5;
  std::vector<SystemEdits> systems(kSystems);
  for (int s = 0; s < kSystems; ++s) systems[static_cast<std::size_t>(s)].system_id = "s" + std::to_string(s);
  std::set<Edit> seen;
  for (int guard = 0; seen.size() < want && guard < 1000; ++guard) {
    const std::size_t start = rng() % (len + 1);
    const int kind = static_cast<int>(rng() % 3);
    std::size_t end = start;
    TokenSeq rep;
    if (kind != 0) end = std::min(len, start + 1 + rng() % 2);
    if (kind != 1) {
      const std::size_t n = 1 + rng() % 2;
      for (std::size_t t = 0; t < n; ++t) rep.push_back(kVocab[rng() % kVocab.size()]);
    }
    if (start == end && rep.empty()) continue;
    if (slice(inst.source, start, end) == rep) continue;
    Edit e = make_edit(inst.source, start, end, rep);
    if (!seen.insert(e).second) continue;
    const unsigned mask = 1u + static_cast<unsigned>(rng() % ((1u << kSystems) - 1));
    for (int s = 0; s < kSystems; ++s) {
      if (mask & (1u << s)) systems[static_cast<std::size_t>(s)].edits.push_back(e);
    }
  }
  inst.edit_union = edit_union(systems, inst.source);
  std::vector<double> p;
  for (std::size_t i = 0; i < inst.edit_union.size(); ++i) p.push_back(uniform(rng, 0.05, 0.95));
  inst.edit_union.p_es = std::move(p);
  inst.config.alpha = uniform(rng, 0.0, 1.0);
  inst.config.beta = uniform(rng, 0.0, 0.9);
  return inst;
}

}  // namespace qecomb::testing
