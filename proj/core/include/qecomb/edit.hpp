#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qecomb/tokens.hpp"

namespace qecomb {

enum class EditOp { kInsertion, kDeletion, kSubstitution };
enum class EditClass { kPunct, kCase, kOther };

inline constexpr int kNumEditTypes = 9;

// Coarse edit category derived from surface form. Only six of the nine
// (op, class) cells are reachable: case edits are always substitutions.
struct EditType {
  EditOp op = EditOp::kSubstitution;
  EditClass cls = EditClass::kOther;

  // "M:PUNCT", "U:OTHER", "R:CASE", ... (M2-style prefixes).
  std::string label() const;
  // Dense index in [0, kNumEditTypes).
  int index() const;

  friend bool operator==(const EditType&, const EditType&) = default;
};

EditType classify_edit(const TokenSeq& source, std::size_t start,
                       std::size_t end, const TokenSeq& replacement);

// An atomic correction over source tokens: replace [start, end) with
// `replacement`. Identity is (start, end, replacement); proposers and count
// are union metadata and do not take part in comparison.
struct Edit {
  std::size_t start = 0;
  std::size_t end = 0;
  TokenSeq replacement;
  EditType type;
  std::set<std::string> proposers;
  int count = 1;

  bool is_insertion() const { return start == end; }
  bool is_deletion() const { return start < end && replacement.empty(); }

  friend bool operator==(const Edit& a, const Edit& b) {
    return a.start == b.start && a.end == b.end &&
           a.replacement == b.replacement;
  }
  friend std::strong_ordering operator<=>(const Edit& a, const Edit& b) {
    if (auto c = a.start <=> b.start; c != 0) return c;
    if (auto c = a.end <=> b.end; c != 0) return c;
    return a.replacement <=> b.replacement;
  }
};

// Builds a validated edit against `source`. Throws IndexOutOfRange for
// bad spans and InvalidEdit for empty insertions or no-ops.
Edit make_edit(const TokenSeq& source, std::size_t start, std::size_t end,
               TokenSeq replacement);

// Returns `sentence` with [start, end) replaced. Indices are taken as-is in
// the sentence's own frame.
TokenSeq apply_edit(const TokenSeq& sentence, const Edit& edit);

// Applies a conflict-free edit set to the source. Order of `edits` does not
// matter. Throws ConflictError if any pair conflicts.
TokenSeq apply_edits(const TokenSeq& source, std::span<const Edit> edits);

// Overlapping open spans, an insertion strictly inside another span, or two
// insertions at the same position.
bool conflicts(const Edit& a, const Edit& b);

// Token-level minimum-edit alignment; adjacent non-match operations are
// merged into one edit. Result is sorted and pairwise conflict-free.
std::vector<Edit> extract_edits(const TokenSeq& source,
                                const TokenSeq& hypothesis);

struct SystemEdits {
  std::string system_id;
  std::vector<Edit> edits;
};

struct EditUnion {
  TokenSeq source;
  std::vector<Edit> edits;  // sorted, deduplicated
  int num_systems = 0;
  // Per-edit classifier probability, parallel to `edits` when populated.
  std::optional<std::vector<double>> p_es;

  std::size_t size() const { return edits.size(); }
};

EditUnion edit_union(std::span<const SystemEdits> per_system,
                     const TokenSeq& source);

// Word labels (one per hypothesis token) and gap labels (m + 1; gap j sits
// after word j, gap 0 before the first word).
struct LabelVector {
  std::vector<double> words;
  std::vector<double> gaps;

  bool well_formed() const { return gaps.size() == words.size() + 1; }
};

LabelVector derive_labels(const TokenSeq& hypothesis,
                          const TokenSeq& reference);

// Marks hypothesis tokens that do not come from the source, i.e. tokens
// produced by the replacement side of extract_edits(source, hypothesis).
std::vector<bool> introduced_tokens(const TokenSeq& source,
                                    const TokenSeq& hypothesis);

}  // namespace qecomb
