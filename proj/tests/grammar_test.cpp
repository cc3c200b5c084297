#include "hblocks/grammar.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <set>

#include "oracles.h"
#include "test_util.h"

namespace hblocks {
namespace {

using testing::degrees;
using testing::numbers;
using testing::seq;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

Building twinkle() {
  const std::vector<ProlongationSpec> specs = {{ProlongationKind::Neighbor, 1, {Degree::IV}}};
  return build(c_major(), seq("I I IV I V I"), specs);
}

// --- classify_segment --------------------------------------------------------

TEST(ClassifyTest, Examples) {
  const Key c = c_major();
  EXPECT_EQ(classify_segment(seq("I IV I"), c), StructureKind::Neighbor);
  EXPECT_EQ(classify_segment(seq("I ii iii"), c), StructureKind::Passing);
  EXPECT_EQ(classify_segment(seq("I IV V vi"), c), StructureKind::Natural);
  // A cadence that returns home is a two-chord neighbor of I.
  EXPECT_EQ(classify_segment(seq("I IV V I"), c), StructureKind::Neighbor);
  EXPECT_EQ(classify_segment(seq("V IV"), c), std::nullopt);
  EXPECT_EQ(classify_segment(seq("I I"), c), StructureKind::Natural);
  EXPECT_EQ(code_of([&] { classify_segment(seq("I"), c); }), ErrorCode::SequenceTooShort);
}

TEST(ClassifyTest, NeighborNeedsDistinctInnerChords) {
  EXPECT_EQ(classify_segment(seq("I I I"), c_major()), StructureKind::Natural);
  EXPECT_EQ(classify_segment(seq("I IV ii I"), c_major()), StructureKind::Neighbor);
  EXPECT_EQ(classify_segment(seq("I IV I I"), c_major()), StructureKind::Natural);
}

TEST(ClassifyTest, PassingDoesNotWrap) {
  EXPECT_EQ(classify_segment(seq("vi vii I"), c_major()), StructureKind::Natural);
  EXPECT_EQ(classify_segment(seq("IV iii ii"), c_major()), StructureKind::Passing);
  EXPECT_EQ(classify_segment(seq("V vi vii"), c_major()), StructureKind::Passing);
}

TEST(ClassifyTest, LongWindowsAreNatural) {
  EXPECT_EQ(classify_segment(seq("I ii iii IV V"), c_major()), StructureKind::Natural);
  EXPECT_EQ(classify_segment(seq("I IV ii vi I"), c_major()), StructureKind::Natural);
}

TEST(ClassifyTest, AgreesWithOracleUpToLengthFour) {
  for (int len = 2; len <= 4; ++len)
    for (const auto& s : testing::all_sequences(len)) {
      const auto got = classify_segment(degrees(s), c_major());
      const char want = oracle::classify(s);
      if (want == 0) {
        EXPECT_FALSE(got.has_value());
      } else {
        ASSERT_TRUE(got.has_value());
        EXPECT_EQ(*got, want == 'N' ? StructureKind::Neighbor
                        : want == 'P' ? StructureKind::Passing
                                      : StructureKind::Natural);
      }
    }
}

// --- build / validate -----------------------------------------------------------

TEST(BuildTest, TwinkleFlattens) {
  const Building b = twinkle();
  EXPECT_EQ(flatten(b), seq("I I IV I IV I V I"));
  EXPECT_EQ(b.block_count(), 7u);
  EXPECT_TRUE(validate_building(b).ok());
  EXPECT_EQ(describe(b), "base [I I IV I V I] Neighbor(1, [IV])");
}

TEST(BuildTest, IdsFollowCanonicalOrder) {
  const Building b = twinkle();
  const auto blocks = b.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) EXPECT_EQ(blocks[i]->id.value, i + 1);
}

TEST(BuildTest, BaseBreakIsReportedAtPair) {
  try {
    build(c_major(), seq("I V IV I"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BaseBreak);
    EXPECT_EQ(e.index(), 1);
  }
}

TEST(BuildTest, EmptyBase) {
  EXPECT_EQ(code_of([] { build(c_major(), {}); }), ErrorCode::EmptyBase);
}

TEST(BuildTest, BadNeighbor) {
  const std::vector<ProlongationSpec> same = {{ProlongationKind::Neighbor, 0, {Degree::I}}};
  EXPECT_EQ(code_of([&] { build(c_major(), seq("I V I"), same); }), ErrorCode::BadNeighbor);
  // V -> IV cannot connect.
  const std::vector<ProlongationSpec> broken = {{ProlongationKind::Neighbor, 1, {Degree::IV}}};
  EXPECT_EQ(code_of([&] { build(c_major(), seq("I V I"), broken); }), ErrorCode::BadNeighbor);
  const std::vector<ProlongationSpec> three = {{ProlongationKind::Neighbor, 0, {Degree::IV, Degree::ii, Degree::V}}};
  EXPECT_EQ(code_of([&] { build(c_major(), seq("I V I"), three); }), ErrorCode::BadNeighbor);
}

TEST(BuildTest, BadPassing) {
  const std::vector<ProlongationSpec> jump = {{ProlongationKind::Passing, 0, {Degree::iii}}};
  EXPECT_EQ(code_of([&] { build(c_major(), seq("I IV"), jump); }), ErrorCode::BadPassing);
  const std::vector<ProlongationSpec> ok = {{ProlongationKind::Passing, 0, {Degree::ii, Degree::iii}}};
  EXPECT_EQ(flatten(build(c_major(), seq("I IV"), ok)), seq("I ii iii IV"));
}

TEST(BuildTest, AnchorChecks) {
  const std::vector<ProlongationSpec> out = {{ProlongationKind::Passing, 2, {Degree::ii}}};
  EXPECT_EQ(code_of([&] { build(c_major(), seq("I V I"), out); }), ErrorCode::AnchorOutOfRange);
  const std::vector<ProlongationSpec> dup = {{ProlongationKind::Neighbor, 0, {Degree::IV}},
                                             {ProlongationKind::Neighbor, 0, {Degree::vi}}};
  EXPECT_EQ(code_of([&] { build(c_major(), seq("I V I"), dup); }), ErrorCode::AnchorConflict);
  // A neighbor and a passing run may share a base block.
  const std::vector<ProlongationSpec> both = {{ProlongationKind::Neighbor, 0, {Degree::IV}},
                                              {ProlongationKind::Passing, 0, {Degree::ii}}};
  EXPECT_EQ(flatten(build(c_major(), seq("I iii"), both)), seq("I IV I ii iii"));
}

TEST(ValidateTest, ReportsEveryViolation) {
  // Hand-assembled: base break at 1, a neighbor whose inner equals its anchor,
  // and a passing run past the end of the row.
  Building b{c_major(), {make_block(Degree::I), make_block(Degree::V), make_block(Degree::IV)}, {}};
  b.prolongations.push_back({ProlongationKind::Neighbor, 0, {make_block(Degree::I)}});
  b.prolongations.push_back({ProlongationKind::Passing, 2, {make_block(Degree::V)}});
  renumber_blocks(b);
  const auto r = validate_building(b);
  std::vector<std::pair<ErrorCode, int>> got;
  for (const auto& v : r.violations) got.emplace_back(v.code, v.index);
  EXPECT_EQ(got, (std::vector<std::pair<ErrorCode, int>>{
                     {ErrorCode::BaseBreak, 1}, {ErrorCode::BadNeighbor, 0}, {ErrorCode::AnchorOutOfRange, 2}}));
}

TEST(ValidateTest, NarrowedTenonBreaksBase) {
  Building b = twinkle();
  b.base[0] = make_block(Degree::I, TenonProfile{{HarmonicFunction::Dominant}}, std::nullopt, b.base[0].id);
  const auto r = validate_building(b);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].code, ErrorCode::BaseBreak);
  EXPECT_EQ(r.violations[0].index, 0);
  EXPECT_EQ(r.violations[0].blocks, (std::vector<BlockId>{BlockId{1}, BlockId{2}}));
}

// --- parse_building ----------------------------------------------------------------

TEST(ParseTest, Examples) {
  const ParseTree t = parse_building(seq("I IV I V I"), c_major());
  EXPECT_EQ(describe(t.root), "base [I V I] Neighbor(0, [IV])");
  EXPECT_EQ(t.labels, (std::vector<StructureKind>{StructureKind::Natural, StructureKind::Natural,
                                                   StructureKind::Natural, StructureKind::Neighbor}));
  EXPECT_EQ(describe(parse_building(seq("I ii iii IV V I"), c_major()).root),
            "base [I IV V I] Passing(0, [ii iii])");
  // Greedy reduction of the Twinkle surface also folds the closing I V I.
  EXPECT_EQ(describe(parse_building(seq("I I IV I IV I V I"), c_major()).root),
            "base [I I IV I] Neighbor(1, [IV]) Neighbor(3, [V])");
}

TEST(ParseTest, UnparseableAtFirstBreak) {
  try {
    parse_building(seq("I V IV"), c_major());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnparseableSequence);
    EXPECT_EQ(e.index(), 1);
  }
  EXPECT_EQ(code_of([] { parse_building({}, c_major()); }), ErrorCode::SequenceTooShort);
}

TEST(ParseTest, SingleChord) {
  const ParseTree t = parse_building(seq("vi"), c_major());
  EXPECT_EQ(flatten(t.root), seq("vi"));
  EXPECT_TRUE(t.root.prolongations.empty());
}

// Checks one sequence against the oracles; returns false on mismatch.
void check_sequence(const std::vector<int>& s) {
  std::optional<int> first_break;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (!oracle::connects(s[i], s[i + 1])) {
      first_break = static_cast<int>(i);
      break;
    }
  if (first_break) {
    try {
      parse_building(degrees(s), c_major());
      ADD_FAILURE() << "parsed a broken sequence";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::UnparseableSequence);
      EXPECT_EQ(e.index(), first_break);
    }
    return;
  }
  const ParseTree t = parse_building(degrees(s), c_major());
  EXPECT_EQ(numbers(flatten(t.root)), s);
  EXPECT_TRUE(validate_building(t.root).ok());

  const oracle::Decomposition want = oracle::best_decomposition(s);
  std::vector<int> base;
  for (const auto& b : t.root.base) base.push_back(degree_number(b.degree));
  EXPECT_EQ(base, want.base);
  ASSERT_EQ(t.root.prolongations.size(), want.prolongations.size());
  for (std::size_t k = 0; k < want.prolongations.size(); ++k) {
    const auto& [kind, anchor, inner] = want.prolongations[k];
    const auto& p = t.root.prolongations[k];
    EXPECT_EQ(p.kind, kind == 'N' ? ProlongationKind::Neighbor : ProlongationKind::Passing);
    EXPECT_EQ(p.anchor, anchor);
    std::vector<int> got_inner;
    for (const auto& b : p.inner) got_inner.push_back(degree_number(b.degree));
    EXPECT_EQ(got_inner, inner);
  }
}

TEST(ParseTest, ExhaustiveUpToLengthFour) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t total = 0;
  for (int len = 1; len <= 4; ++len)
    for (const auto& s : testing::all_sequences(len)) {
      SCOPED_TRACE(::testing::PrintToString(s));
      check_sequence(s);
      ++total;
    }
  EXPECT_EQ(total, 2800u);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(10));
}

// Longer sequences: the oracle is exponential, so sample a fixed subset.
TEST(ParseTest, SampledLengthsFiveToSeven) {
  std::uint64_t x = 0x9E3779B97F4A7C15ull;
  for (int i = 0; i < 3000; ++i) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    std::vector<int> s(5 + x % 3);
    for (auto& v : s) {
      x ^= x << 13;
      x ^= x >> 7;
      x ^= x << 17;
      v = 1 + static_cast<int>(x % 7);
    }
    SCOPED_TRACE(::testing::PrintToString(s));
    check_sequence(s);
  }
}

// --- Puzzle ---------------------------------------------------------------------

TEST(PuzzleTest, SkeletonAndShuffle) {
  const Building b = twinkle();
  const Puzzle p = shuffle_puzzle(b, 42);
  ASSERT_EQ(p.skeleton.size(), 7u);
  EXPECT_EQ(p.skeleton[6].row, 1);
  EXPECT_EQ(p.skeleton[6].anchor, 1);
  EXPECT_EQ(p.skeleton[6].kind, ProlongationKind::Neighbor);
  // Same multiset of blocks, same ids.
  std::multiset<std::uint64_t> got, want;
  for (const auto& blk : p.blocks) got.insert(blk.id.value);
  for (const auto* blk : b.blocks()) want.insert(blk->id.value);
  EXPECT_EQ(got, want);
  // Deterministic in the seed.
  EXPECT_EQ(shuffle_puzzle(b, 42).blocks, p.blocks);
}

TEST(PuzzleTest, SeedsProduceDifferentOrders) {
  const Building b = twinkle();
  std::set<std::vector<std::uint64_t>> orders;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::vector<std::uint64_t> ids;
    for (const auto& blk : shuffle_puzzle(b, seed).blocks) ids.push_back(blk.id.value);
    orders.insert(ids);
  }
  EXPECT_GT(orders.size(), 30u);
}

TEST(PuzzleTest, SurfaceSlotsMatchOracle) {
  const Building b = twinkle();
  EXPECT_EQ(surface_slots(b), oracle::surface_order(6, {{'N', 1, 1}}));
  const std::vector<ProlongationSpec> both = {{ProlongationKind::Passing, 0, {Degree::ii}},
                                              {ProlongationKind::Neighbor, 0, {Degree::IV}}};
  const Building c = build(c_major(), seq("I iii"), both);
  EXPECT_EQ(surface_slots(c), oracle::surface_order(2, {{'P', 0, 1}, {'N', 0, 1}}));
  EXPECT_EQ(flatten(c), seq("I IV I ii iii"));
}

Arrangement identity(const Puzzle& p) {
  Arrangement a;
  const auto blocks = p.target.blocks();
  for (std::size_t s = 0; s < blocks.size(); ++s) a[static_cast<int>(s)] = blocks[s]->id;
  return a;
}

TEST(PuzzleTest, OriginalArrangementIsComplete) {
  const Puzzle p = shuffle_puzzle(twinkle(), 7);
  const auto r = check_reconstruction(p, identity(p));
  EXPECT_EQ(r.status, ReconstructionResult::Status::Complete);
  EXPECT_EQ(r.correct_slots.size(), 7u);
}

TEST(PuzzleTest, SwappingEqualChordsIsStillComplete) {
  const Puzzle p = shuffle_puzzle(twinkle(), 7);
  Arrangement a = identity(p);
  std::swap(a[0], a[1]);  // both I
  std::swap(a[2], a[6]);  // both IV
  EXPECT_EQ(check_reconstruction(p, a).status, ReconstructionResult::Status::Complete);
}

TEST(PuzzleTest, WrongButConnectableIsPartial) {
  const Puzzle p = shuffle_puzzle(twinkle(), 7);
  Arrangement a = identity(p);
  std::swap(a[4], a[6]);  // surface I I V I IV I IV I still connects
  const auto r = check_reconstruction(p, a);
  EXPECT_EQ(r.status, ReconstructionResult::Status::PartialCorrect);
  EXPECT_EQ(r.correct_slots, (std::vector<int>{0, 1, 2, 3, 5}));
}

TEST(PuzzleTest, BrokenConnectionsAreViolations) {
  const Puzzle p = shuffle_puzzle(twinkle(), 7);
  Arrangement a = identity(p);
  std::swap(a[1], a[4]);  // surface I V IV V IV I I I
  const auto r = check_reconstruction(p, a);
  EXPECT_EQ(r.status, ReconstructionResult::Status::Violations);
  EXPECT_EQ(r.correct_slots, (std::vector<int>{0, 2, 3, 5, 6}));
  ASSERT_EQ(r.violations.size(), 2u);
  for (const auto& v : r.violations) {
    EXPECT_EQ(v.code, ErrorCode::IncompatibleConnection);
    EXPECT_EQ(v.index, 1);
  }
}

TEST(PuzzleTest, EmptyArrangementIsPartial) {
  const Puzzle p = shuffle_puzzle(twinkle(), 7);
  const auto r = check_reconstruction(p, {});
  EXPECT_EQ(r.status, ReconstructionResult::Status::PartialCorrect);
  EXPECT_TRUE(r.correct_slots.empty());
}

TEST(PuzzleTest, ErrorsForBadInput) {
  const Puzzle p = shuffle_puzzle(twinkle(), 1);
  EXPECT_EQ(code_of([&] { check_reconstruction(p, {{7, BlockId{1}}}); }), ErrorCode::UnknownSlot);
  EXPECT_EQ(code_of([&] { check_reconstruction(p, {{0, BlockId{99}}}); }), ErrorCode::UnknownBlock);
  EXPECT_EQ(code_of([&] { check_reconstruction(p, {{0, BlockId{1}}, {1, BlockId{1}}}); }), ErrorCode::SlotReuse);
}

}  // namespace
}  // namespace hblocks
