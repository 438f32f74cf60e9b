#include "qecomb/m2.hpp"

#include <algorithm>
#include <charconv>

#include "qecomb/errors.hpp"

namespace qecomb {

namespace {

constexpr std::string_view kSep = "|||";

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(kSep, pos);
    if (next == std::string_view::npos) {
      out.emplace_back(line.substr(pos));
      return out;
    }
    out.emplace_back(line.substr(pos, next - pos));
    pos = next + kSep.size();
  }
}

template <typename T>
bool parse_int(std::string_view s, T& value) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

M2Annotation parse_annotation(std::string_view line, std::size_t lineno) {
  const auto fields = split_fields(line.substr(2));
  if (fields.size() < 3) {
    throw FormatError(lineno, "annotation needs at least span, type and correction");
  }
  const auto span = tokenize(fields[0]);
  M2Annotation a;
  if (span.size() != 2 || !parse_int(span[0], a.start) ||
      !parse_int(span[1], a.end)) {
    throw FormatError(lineno, "bad annotation span '" + fields[0] + "'");
  }
  if (!(a.start == -1 && a.end == -1) && (a.start < 0 || a.end < a.start)) {
    throw FormatError(lineno, "invalid span " + fields[0]);
  }
  a.type = fields[1];
  a.correction = fields[2];
  if (fields.size() > 3) a.required = fields[3];
  if (fields.size() > 4) a.comment = fields[4];
  if (fields.size() > 5 && !parse_int(fields[5], a.annotator)) {
    throw FormatError(lineno, "bad annotator id '" + fields[5] + "'");
  }
  if (fields.size() > 6) {
    throw FormatError(lineno, "too many fields in annotation");
  }
  return a;
}

}  // namespace

std::vector<M2Block> parse_m2(std::istream& in) {
  std::vector<M2Block> blocks;
  bool open = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      open = false;
      continue;
    }
    if (line.rfind("S ", 0) == 0 || line == "S") {
      blocks.push_back(M2Block{tokenize(std::string_view(line).substr(1)), {}});
      open = true;
    } else if (line.rfind("A ", 0) == 0) {
      if (!open) throw FormatError(lineno, "annotation outside a sentence block");
      blocks.back().annotations.push_back(parse_annotation(line, lineno));
    } else {
      throw FormatError(lineno, "expected 'S' or 'A' line");
    }
  }
  return blocks;
}

void emit_m2_block(std::ostream& out, const M2Block& block) {
  out << "S " << join(block.source) << '\n';
  for (const auto& a : block.annotations) {
    out << "A " << a.start << ' ' << a.end << kSep << a.type << kSep
        << a.correction << kSep << a.required << kSep << a.comment << kSep
        << a.annotator << '\n';
  }
  out << '\n';
}

void emit_m2(std::ostream& out, std::span<const M2Block> blocks) {
  for (const auto& b : blocks) emit_m2_block(out, b);
}

M2Block make_m2_block(const TokenSeq& source, std::span<const Edit> edits,
                      int annotator) {
  M2Block block{source, {}};
  if (edits.empty()) {
    M2Annotation noop;
    noop.annotator = annotator;
    block.annotations.push_back(noop);
    return block;
  }
  std::vector<Edit> sorted(edits.begin(), edits.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& e : sorted) {
    M2Annotation a;
    a.start = static_cast<long>(e.start);
    a.end = static_cast<long>(e.end);
    a.type = e.type.label();
    a.correction = join(e.replacement);
    a.annotator = annotator;
    block.annotations.push_back(std::move(a));
  }
  return block;
}

std::map<int, std::vector<Edit>> gold_edits(const M2Block& block) {
  std::map<int, std::vector<Edit>> out;
  if (block.annotations.empty()) {
    out[0];
    return out;
  }
  for (const auto& a : block.annotations) {
    auto& edits = out[a.annotator];
    if (a.is_noop()) continue;
    const auto start = static_cast<std::size_t>(a.start);
    const auto end = static_cast<std::size_t>(a.end);
    if (end > block.source.size()) continue;
    TokenSeq repl = a.correction == "-NONE-" ? TokenSeq{} : tokenize(a.correction);
    if (start == end && repl.empty()) continue;
    if (slice(block.source, start, end) == repl) continue;
    auto e = make_edit(block.source, start, end, std::move(repl));
    if (std::find(edits.begin(), edits.end(), e) == edits.end()) {
      edits.push_back(std::move(e));
    }
  }
  for (auto& [id, edits] : out) std::sort(edits.begin(), edits.end());
  return out;
}

}  // namespace qecomb
