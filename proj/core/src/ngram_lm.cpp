#include "qecomb/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qecomb/errors.hpp"

namespace qecomb {

namespace {

std::string key_of(std::span<const std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

const std::string kUnkString = kUnk;

}  // namespace

NgramModel::NgramModel(int order, double k)
    : order_(order), k_(k), counts_(static_cast<std::size_t>(order)),
      contexts_(static_cast<std::size_t>(order)) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("add-k constant must be > 0");
}

NgramModel NgramModel::train(std::span<const TokenSeq> corpus, int order,
                             double k) {
  NgramModel model(order, k);
  for (const auto& s : corpus) model.add_sentence(s);
  return model;
}

void NgramModel::add_word(const std::string& word) {
  if (word != kEos && word != kUnk && word != kBos) vocab_.insert(word);
}

void NgramModel::add_sentence(const TokenSeq& sentence) {
  for (const auto& w : sentence) add_word(w);
  TokenSeq padded(static_cast<std::size_t>(order_ - 1), kBos);
  padded.insert(padded.end(), sentence.begin(), sentence.end());
  padded.emplace_back(kEos);
  const std::size_t first = static_cast<std::size_t>(order_ - 1);
  for (std::size_t pos = first; pos < padded.size(); ++pos) {
    for (int n = 1; n <= order_; ++n) {
      const std::size_t begin = pos + 1 - static_cast<std::size_t>(n);
      std::span<const std::string> gram(padded.data() + begin,
                                        static_cast<std::size_t>(n));
      ++counts_[static_cast<std::size_t>(n - 1)][key_of(gram)];
      if (n > 1) {
        ++contexts_[static_cast<std::size_t>(n - 1)][key_of(gram.first(gram.size() - 1))];
      }
    }
    ++total_;
  }
}

std::size_t NgramModel::vocab_size() const { return vocab_.size() + 2; }

std::uint64_t NgramModel::count(const TokenSeq& ngram) const {
  if (ngram.empty() || ngram.size() > counts_.size()) return 0;
  const auto& table = counts_[ngram.size() - 1];
  auto it = table.find(key_of(ngram));
  return it == table.end() ? 0 : it->second;
}

std::uint64_t NgramModel::unigram_count(const std::string& word) const {
  return count(TokenSeq{word});
}

const std::string& NgramModel::map_word(const std::string& word) const {
  if (word == kEos || vocab_.count(word)) return word;
  return kUnkString;
}

double NgramModel::log_prob(std::span<const std::string> history,
                            const std::string& word) const {
  const std::string& w = map_word(word);
  const double vk = k_ * static_cast<double>(vocab_size());
  const std::size_t max_ctx =
      std::min(history.size(), static_cast<std::size_t>(order_ - 1));
  for (std::size_t len = max_ctx; len > 0; --len) {
    TokenSeq ctx;
    ctx.reserve(len + 1);
    for (std::size_t i = history.size() - len; i < history.size(); ++i) {
      ctx.push_back(map_word(history[i]) == kUnkString && history[i] != kBos
                        ? kUnkString
                        : history[i]);
    }
    const auto& ctx_table = contexts_[len];
    auto it = ctx_table.find(key_of(ctx));
    if (it == ctx_table.end() || it->second == 0) continue;
    ctx.push_back(w);
    const double c = static_cast<double>(count(ctx));
    return std::log((c + k_) / (static_cast<double>(it->second) + vk));
  }
  const double c = static_cast<double>(unigram_count(w));
  return std::log((c + k_) / (static_cast<double>(total_) + vk));
}

std::vector<double> NgramModel::sentence_log_probs(const TokenSeq& sentence) const {
  TokenSeq padded(static_cast<std::size_t>(order_ - 1), kBos);
  padded.insert(padded.end(), sentence.begin(), sentence.end());
  padded.emplace_back(kEos);
  std::vector<double> out;
  out.reserve(sentence.size() + 1);
  const std::size_t first = static_cast<std::size_t>(order_ - 1);
  for (std::size_t pos = first; pos < padded.size(); ++pos) {
    std::span<const std::string> history(padded.data(), pos);
    out.push_back(log_prob(history, padded[pos]));
  }
  return out;
}

double NgramModel::perplexity(const TokenSeq& sentence) const {
  const auto lps = sentence_log_probs(sentence);
  double sum = 0.0;
  for (double lp : lps) sum += lp;
  return std::exp(-sum / static_cast<double>(lps.size()));
}

void NgramModel::save(std::ostream& out) const {
  out << "qecomb-ngram 1\n";
  out << "order " << order_ << '\n';
  std::ostringstream kstr;
  kstr.precision(17);
  kstr << k_;
  out << "k " << kstr.str() << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (const auto& w : vocab_) out << w << '\n';
  for (int n = 1; n <= order_; ++n) {
    std::map<std::string, std::uint64_t> sorted(
        counts_[static_cast<std::size_t>(n - 1)].begin(),
        counts_[static_cast<std::size_t>(n - 1)].end());
    out << "ngrams " << n << ' ' << sorted.size() << '\n';
    for (const auto& [gram, c] : sorted) out << c << '\t' << gram << '\n';
  }
  out << "end\n";
}

NgramModel NgramModel::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw FormatError(lineno + 1, std::string("unexpected end of file, expected ") + what);
    }
    ++lineno;
    return std::istringstream(line);
  };
  {
    auto ls = next("header");
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != "qecomb-ngram") throw FormatError(lineno, "not a qecomb n-gram model");
    if (version != 1) {
      throw SchemaMismatch("unsupported n-gram model version " + std::to_string(version));
    }
  }
  int order = 0;
  double k = 0.0;
  std::size_t vocab = 0;
  std::string tag;
  if (!(next("order") >> tag >> order) || tag != "order") throw FormatError(lineno, "expected 'order'");
  if (!(next("k") >> tag >> k) || tag != "k") throw FormatError(lineno, "expected 'k'");
  if (!(next("vocab") >> tag >> vocab) || tag != "vocab") throw FormatError(lineno, "expected 'vocab'");
  NgramModel model(order, k);
  for (std::size_t i = 0; i < vocab; ++i) {
    next("vocabulary word");
    model.vocab_.insert(line);
  }
  for (int n = 1; n <= order; ++n) {
    int got_n = 0;
    std::size_t entries = 0;
    if (!(next("ngrams") >> tag >> got_n >> entries) || tag != "ngrams" || got_n != n) {
      throw FormatError(lineno, "expected 'ngrams " + std::to_string(n) + "'");
    }
    auto& table = model.counts_[static_cast<std::size_t>(n - 1)];
    for (std::size_t i = 0; i < entries; ++i) {
      next("n-gram entry");
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw FormatError(lineno, "missing tab in n-gram entry");
      const std::uint64_t c = std::stoull(line.substr(0, tab));
      const std::string gram = line.substr(tab + 1);
      const auto words = tokenize(gram);
      if (words.size() != static_cast<std::size_t>(n)) {
        throw FormatError(lineno, "n-gram has wrong order");
      }
      table[gram] = c;
      if (n == 1) {
        model.total_ += c;
      } else {
        const TokenSeq ctx(words.begin(), words.end() - 1);
        model.contexts_[static_cast<std::size_t>(n - 1)][key_of(ctx)] += c;
      }
    }
  }
  next("end");
  if (line != "end") throw FormatError(lineno, "expected 'end'");
  return model;
}

void NgramModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save(out);
}

NgramModel NgramModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return load(in);
}

}  // namespace qecomb
