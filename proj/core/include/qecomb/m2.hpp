#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qecomb/edit.hpp"
#include "qecomb/tokens.hpp"

namespace qecomb {

// One "A start end|||type|||correction|||required|||comment|||annotator"
// line. Fields are kept verbatim so emission round-trips.
struct M2Annotation {
  long start = -1;
  long end = -1;
  std::string type = "noop";
  std::string correction = "-NONE-";
  std::string required = "REQUIRED";
  std::string comment = "-NONE-";
  int annotator = 0;

  bool is_noop() const { return start == -1 && end == -1; }
};

struct M2Block {
  TokenSeq source;
  std::vector<M2Annotation> annotations;
};

// Parses blank-line separated blocks. Throws FormatError with the 1-based
// line number on malformed input.
std::vector<M2Block> parse_m2(std::istream& in);

void emit_m2(std::ostream& out, std::span<const M2Block> blocks);
void emit_m2_block(std::ostream& out, const M2Block& block);

// Block for a single annotator; an empty edit list yields a noop line.
M2Block make_m2_block(const TokenSeq& source, std::span<const Edit> edits,
                      int annotator = 0);

// Gold edits per annotator id. A block with no annotations is treated as a
// single annotator (id 0) with no edits. Identity and malformed spans are
// dropped; noop annotators map to an empty set.
std::map<int, std::vector<Edit>> gold_edits(const M2Block& block);

}  // namespace qecomb
