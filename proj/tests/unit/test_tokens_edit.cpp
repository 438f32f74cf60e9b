#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "qecomb/edit.hpp"
#include "qecomb/errors.hpp"

using namespace qecomb;

namespace {

const char* kSource =
    "To sum it up I still consider having their own car is way more safe and convinient .";
const char* kCorrection =
    "To sum up , I still consider having your own car way more safe and convenient .";

Edit E(const TokenSeq& s, std::size_t start, std::size_t end, const std::string& rep) {
  return make_edit(s, start, end, tokenize(rep));
}

// Plain unit-cost Levenshtein distance.
std::size_t levenshtein(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

TokenSeq random_seq(std::mt19937_64& rng, std::size_t max_len, int vocab) {
  TokenSeq s;
  const std::size_t n = rng() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.push_back(std::string(1, static_cast<char>('a' + rng() % vocab)));
  return s;
}

}  // namespace

TEST(Tokenize, SplitsOnWhitespaceRuns) {
  EXPECT_EQ(tokenize("To sum it up"), (TokenSeq{"To", "sum", "it", "up"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("a  b"), (TokenSeq{"a", "b"}));
  EXPECT_EQ(tokenize(" \ta\n b \r\n"), (TokenSeq{"a", "b"}));
}

TEST(Tokenize, JoinRoundTrip) {
  const TokenSeq t = tokenize(kSource);
  EXPECT_EQ(tokenize(join(t)), t);
  EXPECT_EQ(join(TokenSeq{}), "");
}

TEST(Edit, MakeEditValidates) {
  const TokenSeq s = tokenize("a b c");
  EXPECT_THROW(make_edit(s, 2, 1, {"x"}), IndexOutOfRange);
  EXPECT_THROW(make_edit(s, 1, 4, {"x"}), IndexOutOfRange);
  EXPECT_THROW(make_edit(s, 1, 1, {}), InvalidEdit);
  EXPECT_THROW(make_edit(s, 1, 2, {"b"}), InvalidEdit);
  EXPECT_NO_THROW(make_edit(s, 3, 3, {"d"}));
}

TEST(Edit, TypesFollowSurfaceForm) {
  const TokenSeq s = tokenize(kSource);
  EXPECT_EQ(E(s, 2, 3, "").type.label(), "U:OTHER");
  EXPECT_EQ(E(s, 4, 4, ",").type.label(), "M:PUNCT");
  EXPECT_EQ(E(s, 8, 9, "your").type.label(), "R:OTHER");
  EXPECT_EQ(E(s, 0, 1, "to").type.label(), "R:CASE");
  EXPECT_EQ(E(s, 17, 18, "!").type.label(), "R:PUNCT");
  std::set<int> seen;
  for (int op = 0; op < 3; ++op) {
    for (int cls = 0; cls < 3; ++cls) {
      seen.insert(EditType{static_cast<EditOp>(op), static_cast<EditClass>(cls)}.index());
    }
  }
  EXPECT_EQ(seen.size(), static_cast<std::size_t>(kNumEditTypes));
}

TEST(ExtractEdits, TableOneExample) {
  const TokenSeq s = tokenize(kSource);
  const auto edits = extract_edits(s, tokenize(kCorrection));
  const std::vector<Edit> want = {E(s, 2, 3, ""), E(s, 4, 4, ","), E(s, 8, 9, "your"),
                                  E(s, 11, 12, ""), E(s, 16, 17, "convenient")};
  EXPECT_EQ(edits, want);
  EXPECT_EQ(join(apply_edits(s, edits)), kCorrection);
}

TEST(ExtractEdits, IdenticalIsEmpty) {
  const TokenSeq s = tokenize(kSource);
  EXPECT_TRUE(extract_edits(s, s).empty());
  EXPECT_TRUE(extract_edits({}, {}).empty());
}

TEST(ExtractEdits, AdjacentOperationsMerge) {
  const TokenSeq s = {"a", "b"};
  const auto edits = extract_edits(s, {"a", "c", "d"});
  ASSERT_EQ(edits.size(), 1u);
  EXPECT_EQ(edits[0], E(s, 1, 2, "c d"));
}

TEST(ExtractEdits, EmptySides) {
  const TokenSeq s = {"a", "b"};
  EXPECT_EQ(extract_edits(s, {}), std::vector<Edit>{E(s, 0, 2, "")});
  EXPECT_EQ(extract_edits({}, s), std::vector<Edit>{make_edit({}, 0, 0, s)});
}

// Each merged edit costs max(span, replacement) under unit-cost alignment,
// so a minimal edit set sums to the Levenshtein distance.
TEST(ExtractEdits, MinimalAndRoundTripsOnRandomPairs) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 2000; ++n) {
    const TokenSeq s = random_seq(rng, 9, 4);
    const TokenSeq h = random_seq(rng, 9, 4);
    const auto edits = extract_edits(s, h);
    ASSERT_EQ(apply_edits(s, edits), h);
    ASSERT_TRUE(std::is_sorted(edits.begin(), edits.end()));
    std::size_t cost = 0;
    for (std::size_t i = 0; i < edits.size(); ++i) {
      cost += std::max(edits[i].end - edits[i].start, edits[i].replacement.size());
      for (std::size_t j = i + 1; j < edits.size(); ++j) ASSERT_FALSE(conflicts(edits[i], edits[j]));
    }
    ASSERT_EQ(cost, levenshtein(s, h)) << join(s) << " -> " << join(h);
  }
}

TEST(ApplyEdit, DeletionAndInsertion) {
  const TokenSeq s = {"To", "sum", "it", "up"};
  EXPECT_EQ(apply_edit(s, E(s, 2, 3, "")), (TokenSeq{"To", "sum", "up"}));
  const TokenSeq ab = {"a", "b"};
  EXPECT_EQ(apply_edit(ab, E(ab, 1, 1, "x y")), (TokenSeq{"a", "x", "y", "b"}));
  Edit far = E(ab, 1, 2, "z");
  far.end = 5;
  EXPECT_THROW(apply_edit(ab, far), IndexOutOfRange);
}

TEST(ApplyEdits, EmptySetIsIdentity) {
  const TokenSeq s = tokenize(kSource);
  EXPECT_EQ(apply_edits(s, {}), s);
}

TEST(ApplyEdits, OrderDoesNotMatter) {
  const TokenSeq s = tokenize("a b c d e f");
  std::vector<Edit> edits = {E(s, 5, 6, "F"), E(s, 0, 0, "z"), E(s, 2, 3, ""), E(s, 3, 3, "q r")};
  std::sort(edits.begin(), edits.end());
  const TokenSeq sorted = apply_edits(s, edits);
  EXPECT_EQ(sorted, tokenize("z a b q r d e F"));
  do {
    EXPECT_EQ(apply_edits(s, edits), sorted);
  } while (std::next_permutation(edits.begin(), edits.end()));
}

TEST(ApplyEdits, RejectsConflicts) {
  const TokenSeq s = tokenize("a b c d e f g");
  const std::vector<Edit> edits = {E(s, 2, 5, "x"), E(s, 4, 6, "y")};
  EXPECT_THROW(apply_edits(s, edits), ConflictError);
}

TEST(Conflicts, Examples) {
  const TokenSeq s = tokenize("a b c d e f g");
  EXPECT_TRUE(conflicts(E(s, 2, 5, "x"), E(s, 4, 6, "y")));
  EXPECT_FALSE(conflicts(E(s, 2, 3, "x"), E(s, 3, 4, "y")));
  EXPECT_TRUE(conflicts(E(s, 4, 4, "x"), E(s, 4, 4, "y")));
  EXPECT_TRUE(conflicts(E(s, 2, 5, "x"), E(s, 3, 3, "y")));
  EXPECT_FALSE(conflicts(E(s, 2, 5, "x"), E(s, 2, 2, "y")));
  EXPECT_FALSE(conflicts(E(s, 2, 5, "x"), E(s, 5, 5, "y")));
  EXPECT_FALSE(conflicts(E(s, 3, 3, "x"), E(s, 4, 4, "y")));
}

TEST(Conflicts, SymmetricAndMatchesApplicability) {
  std::mt19937_64 rng(9);
  const TokenSeq s = tokenize("a b c d e f");
  auto random_edit = [&] {
    for (;;) {
      const std::size_t a = rng() % 7, b = a + rng() % (7 - a);
      TokenSeq rep;
      if (rng() % 2) rep.push_back("x" + std::to_string(rng() % 3));
      try {
        return make_edit(s, a, b, rep);
      } catch (const InvalidEdit&) {
      }
    }
  };
  for (int n = 0; n < 3000; ++n) {
    const Edit a = random_edit(), b = random_edit();
    ASSERT_EQ(conflicts(a, b), conflicts(b, a));
    if (a == b) continue;
    // Disjoint edits compose the same way in either application order.
    if (!conflicts(a, b)) {
      const std::vector<Edit> ab = {a, b};
      const std::vector<Edit> ba = {b, a};
      ASSERT_EQ(apply_edits(s, ab), apply_edits(s, ba));
    }
  }
}

TEST(EditUnion, CountsAndProposers) {
  const TokenSeq s = tokenize("p q r s");
  std::vector<SystemEdits> systems = {{"A", {E(s, 1, 2, "x")}},
                                      {"B", {E(s, 1, 2, "x"), E(s, 3, 3, "y")}}};
  const EditUnion u = edit_union(systems, s);
  EXPECT_EQ(u.num_systems, 2);
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u.edits[0], E(s, 1, 2, "x"));
  EXPECT_EQ(u.edits[0].count, 2);
  EXPECT_EQ(u.edits[0].proposers, (std::set<std::string>{"A", "B"}));
  EXPECT_EQ(u.edits[1].count, 1);
  EXPECT_EQ(u.edits[1].proposers, (std::set<std::string>{"B"}));
  EXPECT_FALSE(u.p_es.has_value());
}

TEST(EditUnion, NoSystems) {
  const EditUnion u = edit_union({}, tokenize("a b"));
  EXPECT_EQ(u.size(), 0u);
  EXPECT_EQ(u.num_systems, 0);
}

TEST(EditUnion, SortedDedupedAndBoundedCounts) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 200; ++n) {
    const auto inst = qecomb::testing::random_instance(rng, 12);
    const auto& edits = inst.edit_union.edits;
    ASSERT_TRUE(std::is_sorted(edits.begin(), edits.end()));
    ASSERT_EQ(std::adjacent_find(edits.begin(), edits.end()), edits.end());
    for (const auto& e : edits) {
      ASSERT_GE(e.count, 1);
      ASSERT_LE(e.count, inst.edit_union.num_systems);
    }
  }
}

TEST(DeriveLabels, Substitution) {
  const auto l = derive_labels(tokenize("I is here"), tokenize("I am here"));
  EXPECT_EQ(l.words, (std::vector<double>{1, 0, 1}));
  EXPECT_EQ(l.gaps, (std::vector<double>{1, 1, 1, 1}));
}

TEST(DeriveLabels, MissingWordMarksGap) {
  const auto l = derive_labels(tokenize("I here"), tokenize("I am here"));
  EXPECT_EQ(l.words, (std::vector<double>{1, 1}));
  EXPECT_EQ(l.gaps, (std::vector<double>{1, 0, 1}));
}

TEST(DeriveLabels, ShapeAndPerfectHypothesis) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 500; ++n) {
    const TokenSeq h = random_seq(rng, 8, 3);
    const TokenSeq r = random_seq(rng, 8, 3);
    const auto l = derive_labels(h, r);
    ASSERT_TRUE(l.well_formed());
    ASSERT_EQ(l.words.size(), h.size());
    const bool all_one = std::all_of(l.words.begin(), l.words.end(), [](double v) { return v == 1.0; }) &&
                         std::all_of(l.gaps.begin(), l.gaps.end(), [](double v) { return v == 1.0; });
    ASSERT_EQ(all_one, h == r);
  }
}

TEST(IntroducedTokens, MarksReplacementSide) {
  const auto flags = introduced_tokens(tokenize("a b c"), tokenize("a x y c"));
  EXPECT_EQ(flags, (std::vector<bool>{false, true, true, false}));
  EXPECT_EQ(introduced_tokens(tokenize("a b"), tokenize("a b")), (std::vector<bool>{false, false}));
}
