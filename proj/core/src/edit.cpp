#include "qecomb/edit.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "qecomb/errors.hpp"

namespace qecomb {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool all_punct(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() && b.empty()) return false;
  auto punct = [](const std::string& t) { return is_punct_token(t); };
  return std::all_of(a.begin(), a.end(), punct) &&
         std::all_of(b.begin(), b.end(), punct);
}

std::string span_string(const Edit& e) {
  return "(" + std::to_string(e.start) + "," + std::to_string(e.end) + ",\"" +
         join(e.replacement) + "\")";
}

}  // namespace

std::string EditType::label() const {
  std::string out;
  switch (op) {
    case EditOp::kInsertion: out = "M:"; break;
    case EditOp::kDeletion: out = "U:"; break;
    case EditOp::kSubstitution: out = "R:"; break;
  }
  switch (cls) {
    case EditClass::kPunct: out += "PUNCT"; break;
    case EditClass::kCase: out += "CASE"; break;
    case EditClass::kOther: out += "OTHER"; break;
  }
  return out;
}

int EditType::index() const {
  return static_cast<int>(op) * 3 + static_cast<int>(cls);
}

EditType classify_edit(const TokenSeq& source, std::size_t start,
                       std::size_t end, const TokenSeq& replacement) {
  EditType t;
  const TokenSeq original = slice(source, start, end);
  if (start == end) {
    t.op = EditOp::kInsertion;
  } else if (replacement.empty()) {
    t.op = EditOp::kDeletion;
  } else {
    t.op = EditOp::kSubstitution;
  }
  if (all_punct(original, replacement)) {
    t.cls = EditClass::kPunct;
  } else if (t.op == EditOp::kSubstitution &&
             lowercase(join(original)) == lowercase(join(replacement))) {
    t.cls = EditClass::kCase;
  } else {
    t.cls = EditClass::kOther;
  }
  return t;
}

Edit make_edit(const TokenSeq& source, std::size_t start, std::size_t end,
               TokenSeq replacement) {
  if (start > end || end > source.size()) {
    throw IndexOutOfRange("edit span [" + std::to_string(start) + "," +
                          std::to_string(end) + ") outside sentence of length " +
                          std::to_string(source.size()));
  }
  if (start == end && replacement.empty()) {
    throw InvalidEdit("empty insertion at " + std::to_string(start));
  }
  if (slice(source, start, end) == replacement) {
    throw InvalidEdit("no-op edit at [" + std::to_string(start) + "," +
                      std::to_string(end) + ")");
  }
  Edit e;
  e.start = start;
  e.end = end;
  e.type = classify_edit(source, start, end, replacement);
  e.replacement = std::move(replacement);
  return e;
}

TokenSeq apply_edit(const TokenSeq& sentence, const Edit& edit) {
  if (edit.start > edit.end || edit.end > sentence.size()) {
    throw IndexOutOfRange("edit " + span_string(edit) +
                          " outside sentence of length " +
                          std::to_string(sentence.size()));
  }
  TokenSeq out;
  out.reserve(sentence.size() + edit.replacement.size());
  out.insert(out.end(), sentence.begin(),
             sentence.begin() + static_cast<std::ptrdiff_t>(edit.start));
  out.insert(out.end(), edit.replacement.begin(), edit.replacement.end());
  out.insert(out.end(), sentence.begin() + static_cast<std::ptrdiff_t>(edit.end),
             sentence.end());
  return out;
}

bool conflicts(const Edit& a, const Edit& b) {
  if (a.is_insertion() && b.is_insertion()) return a.start == b.start;
  if (a.is_insertion()) return b.start < a.start && a.start < b.end;
  if (b.is_insertion()) return a.start < b.start && b.start < a.end;
  return std::max(a.start, b.start) < std::min(a.end, b.end);
}

TokenSeq apply_edits(const TokenSeq& source, std::span<const Edit> edits) {
  std::vector<const Edit*> order;
  order.reserve(edits.size());
  for (const auto& e : edits) {
    if (e.end > source.size() || e.start > e.end) {
      throw IndexOutOfRange("edit " + span_string(e) +
                            " outside source of length " +
                            std::to_string(source.size()));
    }
    order.push_back(&e);
  }
  std::sort(order.begin(), order.end(),
            [](const Edit* x, const Edit* y) { return *x < *y; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (conflicts(*order[i], *order[j])) {
        throw ConflictError("edits " + span_string(*order[i]) + " and " +
                            span_string(*order[j]) + " conflict");
      }
    }
  }
  TokenSeq out;
  out.reserve(source.size() + 4);
  std::size_t pos = 0;
  for (const Edit* e : order) {
    out.insert(out.end(), source.begin() + static_cast<std::ptrdiff_t>(pos),
               source.begin() + static_cast<std::ptrdiff_t>(e->start));
    out.insert(out.end(), e->replacement.begin(), e->replacement.end());
    pos = e->end;
  }
  out.insert(out.end(), source.begin() + static_cast<std::ptrdiff_t>(pos),
             source.end());
  return out;
}

namespace {

enum class Op { kMatch, kSub, kDel, kIns };

// Minimum-distance alignment; among equal-distance alignments the one with
// the most matched tokens wins, then match > sub > del > ins on backtrace.
std::vector<Op> align(const TokenSeq& s, const TokenSeq& h) {
  const std::size_t l = s.size(), m = h.size();
  const std::size_t w = m + 1;
  std::vector<int> dist((l + 1) * w), matches((l + 1) * w);
  auto at = [w](std::size_t i, std::size_t j) { return i * w + j; };
  // Lexicographic cost: (distance, -matches).
  auto better = [](int d1, int m1, int d2, int m2) {
    return d1 < d2 || (d1 == d2 && m1 > m2);
  };
  for (std::size_t i = 0; i <= l; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 || j == 0) {
        dist[at(i, j)] = static_cast<int>(i + j);
        matches[at(i, j)] = 0;
        continue;
      }
      const bool eq = s[i - 1] == h[j - 1];
      int bd = dist[at(i - 1, j - 1)] + (eq ? 0 : 1);
      int bm = matches[at(i - 1, j - 1)] + (eq ? 1 : 0);
      if (better(dist[at(i - 1, j)] + 1, matches[at(i - 1, j)], bd, bm)) {
        bd = dist[at(i - 1, j)] + 1;
        bm = matches[at(i - 1, j)];
      }
      if (better(dist[at(i, j - 1)] + 1, matches[at(i, j - 1)], bd, bm)) {
        bd = dist[at(i, j - 1)] + 1;
        bm = matches[at(i, j - 1)];
      }
      dist[at(i, j)] = bd;
      matches[at(i, j)] = bm;
    }
  }
  std::vector<Op> ops;
  std::size_t i = l, j = m;
  while (i > 0 || j > 0) {
    const int d = dist[at(i, j)], mt = matches[at(i, j)];
    if (i > 0 && j > 0) {
      const bool eq = s[i - 1] == h[j - 1];
      if (eq && dist[at(i - 1, j - 1)] == d &&
          matches[at(i - 1, j - 1)] + 1 == mt) {
        ops.push_back(Op::kMatch);
        --i, --j;
        continue;
      }
      if (!eq && dist[at(i - 1, j - 1)] + 1 == d &&
          matches[at(i - 1, j - 1)] == mt) {
        ops.push_back(Op::kSub);
        --i, --j;
        continue;
      }
    }
    if (i > 0 && dist[at(i - 1, j)] + 1 == d && matches[at(i - 1, j)] == mt) {
      ops.push_back(Op::kDel);
      --i;
      continue;
    }
    ops.push_back(Op::kIns);
    --j;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

}  // namespace

std::vector<Edit> extract_edits(const TokenSeq& source,
                                const TokenSeq& hypothesis) {
  const auto ops = align(source, hypothesis);
  std::vector<Edit> edits;
  std::size_t i = 0, j = 0, k = 0;
  while (k < ops.size()) {
    if (ops[k] == Op::kMatch) {
      ++i, ++j, ++k;
      continue;
    }
    const std::size_t i0 = i, j0 = j;
    while (k < ops.size() && ops[k] != Op::kMatch) {
      if (ops[k] != Op::kIns) ++i;
      if (ops[k] != Op::kDel) ++j;
      ++k;
    }
    edits.push_back(make_edit(source, i0, i, slice(hypothesis, j0, j)));
  }
  return edits;
}

EditUnion edit_union(std::span<const SystemEdits> per_system,
                     const TokenSeq& source) {
  EditUnion u;
  u.source = source;
  u.num_systems = static_cast<int>(per_system.size());
  std::map<Edit, Edit> merged;
  for (const auto& sys : per_system) {
    for (const auto& e : sys.edits) {
      auto [it, inserted] = merged.try_emplace(e, e);
      if (inserted) it->second.proposers.clear();
      it->second.proposers.insert(sys.system_id);
    }
  }
  u.edits.reserve(merged.size());
  for (auto& [key, e] : merged) {
    e.count = static_cast<int>(e.proposers.size());
    u.edits.push_back(std::move(e));
  }
  return u;
}

LabelVector derive_labels(const TokenSeq& hypothesis,
                          const TokenSeq& reference) {
  LabelVector labels;
  labels.words.assign(hypothesis.size(), 1.0);
  labels.gaps.assign(hypothesis.size() + 1, 1.0);
  for (const auto& e : extract_edits(hypothesis, reference)) {
    if (e.is_insertion()) {
      labels.gaps[e.start] = 0.0;
    } else {
      for (std::size_t i = e.start; i < e.end; ++i) labels.words[i] = 0.0;
    }
  }
  return labels;
}

std::vector<bool> introduced_tokens(const TokenSeq& source,
                                    const TokenSeq& hypothesis) {
  std::vector<bool> out(hypothesis.size(), false);
  // Walk source-frame edits and translate into hypothesis positions.
  std::ptrdiff_t offset = 0;
  for (const auto& e : extract_edits(source, hypothesis)) {
    const auto hyp_start = static_cast<std::ptrdiff_t>(e.start) + offset;
    for (std::size_t t = 0; t < e.replacement.size(); ++t) {
      out[static_cast<std::size_t>(hyp_start) + t] = true;
    }
    offset += static_cast<std::ptrdiff_t>(e.replacement.size()) -
              static_cast<std::ptrdiff_t>(e.end - e.start);
  }
  return out;
}

}  // namespace qecomb
