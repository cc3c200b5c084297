#include "hblocks/content.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <functional>
#include <fstream>
#include <set>

#include "hblocks/errors.h"
#include "hblocks/serialize.h"
#include "oracles.h"
#include "test_util.h"

namespace hblocks {
namespace {

namespace fs = std::filesystem;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

fs::path copy_of_stock(const std::string& name) {
  const fs::path dir = testing::scratch_dir(name);
  fs::copy(testing::stock_content(), dir, fs::copy_options::recursive);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::trunc) << text; }

TEST(LevelSequenceTest, StockContent) {
  const auto levels = level_sequence(testing::stock_content());
  ASSERT_EQ(levels.size(), 7u);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    EXPECT_EQ(levels[i].id, static_cast<int>(i) + 1);
    EXPECT_TRUE(validate_building(levels[i].demo_building).ok()) << "level " << i + 1;
  }
}

TEST(LevelSequenceTest, MissingFile) {
  const auto dir = copy_of_stock("content-missing");
  fs::remove(level_file_path(dir, 5));
  EXPECT_EQ(code_of([&] { level_sequence(dir); }), ErrorCode::ContentMissing);
  EXPECT_EQ(code_of([] { level_sequence("/nonexistent/hblocks"); }), ErrorCode::ContentMissing);
}

TEST(LevelSequenceTest, MalformedJson) {
  const auto dir = copy_of_stock("content-malformed");
  write(level_file_path(dir, 3), "{ \"id\": 3, ");
  EXPECT_EQ(code_of([&] { level_sequence(dir); }), ErrorCode::SchemaViolation);
}

TEST(LevelSequenceTest, UnknownField) {
  const auto dir = copy_of_stock("content-unknown");
  Json j = parse_document(read_text_file(level_file_path(dir, 2)));
  j["difficulty"] = "easy";
  write(level_file_path(dir, 2), canonical_dump(j));
  EXPECT_EQ(code_of([&] { level_sequence(dir); }), ErrorCode::SchemaViolation);
}

TEST(LevelSequenceTest, ChordUsedBeforeItIsTaught) {
  const auto dir = copy_of_stock("content-early-vii");
  Json j = parse_document(read_text_file(level_file_path(dir, 2)));
  // I vii I is a valid neighbor figure, but vii is only taught in level 7.
  const std::vector<ProlongationSpec> specs{{ProlongationKind::Neighbor, 1, {Degree::vii}}};
  j["demo_building"] = building_to_json(build(c_major(), testing::seq("I I"), specs));
  write(level_file_path(dir, 2), canonical_dump(j));
  try {
    level_sequence(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChordNotYetTaught);
  }
}

TEST(ResolveContentTest, FlagBeatsEnvironmentBeatsFallback) {
  ::unsetenv(kContentEnvVar);
  EXPECT_EQ(resolve_content_dir(std::nullopt, "/fallback"), fs::path("/fallback"));
  ::setenv(kContentEnvVar, "/from-env", 1);
  EXPECT_EQ(resolve_content_dir(std::nullopt, "/fallback"), fs::path("/from-env"));
  EXPECT_EQ(resolve_content_dir(std::string("/from-flag"), "/fallback"), fs::path("/from-flag"));
  ::setenv(kContentEnvVar, "", 1);
  EXPECT_EQ(resolve_content_dir(std::nullopt, "/fallback"), fs::path("/fallback"));
  ::unsetenv(kContentEnvVar);
}

// --- Puzzle brute force over stock demos -------------------------------------

std::vector<std::tuple<char, int, int>> shape(const Building& b) {
  std::vector<std::tuple<char, int, int>> out;
  for (const auto& p : b.prolongations)
    out.emplace_back(p.kind == ProlongationKind::Neighbor ? 'N' : 'P', p.anchor, static_cast<int>(p.inner.size()));
  return out;
}

std::vector<int> target_numbers(const Building& b) {
  std::vector<int> out;
  for (const auto& blk : b.base) out.push_back(degree_number(blk.degree));
  for (const auto& p : b.prolongations)
    for (const auto& blk : p.inner) out.push_back(degree_number(blk.degree));
  return out;
}

// Visits every partial injective slot -> block assignment.
void each_assignment(int slots, int blocks, std::vector<int>& cur, int slot, std::vector<bool>& used,
                     const std::function<void(const std::vector<int>&)>& fn) {
  if (slot == slots) {
    fn(cur);
    return;
  }
  cur[static_cast<std::size_t>(slot)] = -1;
  each_assignment(slots, blocks, cur, slot + 1, used, fn);
  for (int b = 0; b < blocks; ++b) {
    if (used[static_cast<std::size_t>(b)]) continue;
    used[static_cast<std::size_t>(b)] = true;
    cur[static_cast<std::size_t>(slot)] = b;
    each_assignment(slots, blocks, cur, slot + 1, used, fn);
    used[static_cast<std::size_t>(b)] = false;
  }
}

TEST(PuzzleBruteForceTest, StockDemosUpToFiveBlocks) {
  int checked_levels = 0;
  for (const Level& level : testing::stock_levels()) {
    const Building& b = level.demo_building;
    const Puzzle p = shuffle_puzzle(b, level.puzzle_seed);
    const int n = static_cast<int>(p.blocks.size());
    if (n > 5) continue;
    ++checked_levels;
    const std::vector<int> want = target_numbers(b);
    const std::vector<int> order = oracle::surface_order(static_cast<int>(b.base.size()), shape(b));

    std::vector<int> cur(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    long visited = 0;
    each_assignment(n, n, cur, 0, used, [&](const std::vector<int>& a) {
      ++visited;
      Arrangement arr;
      std::vector<int> placed(a.size(), 0);  // degree number, 0 = empty
      for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s] < 0) continue;
        const MusicalBlock& blk = p.blocks[static_cast<std::size_t>(a[s])];
        arr[static_cast<int>(s)] = blk.id;
        placed[s] = degree_number(blk.degree);
      }
      std::vector<int> correct;
      for (std::size_t s = 0; s < a.size(); ++s)
        if (placed[s] == want[s]) correct.push_back(static_cast<int>(s));
      int broken = 0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const int x = placed[static_cast<std::size_t>(order[i])], y = placed[static_cast<std::size_t>(order[i + 1])];
        if (x && y && !oracle::connects(x, y)) ++broken;
      }

      const auto r = check_reconstruction(p, arr);
      const bool complete = correct.size() == a.size();
      EXPECT_EQ(r.status == ReconstructionResult::Status::Complete, complete);
      if (!complete) {
        EXPECT_EQ(r.correct_slots, correct);
        EXPECT_EQ(static_cast<int>(r.violations.size()), broken);
        EXPECT_EQ(r.status == ReconstructionResult::Status::Violations, broken > 0);
      }
    });
    // Partial injections of n blocks into n slots.
    long expect = 0, falling = 1;
    for (int k = 0; k <= n; ++k) {
      long choose = 1;
      for (int i = 0; i < k; ++i) choose = choose * (n - i) / (i + 1);
      expect += choose * falling;
      falling *= n - k;
    }
    EXPECT_EQ(visited, expect) << "level " << level.id;
  }
  EXPECT_GE(checked_levels, 4);
}

TEST(PuzzleBruteForceTest, EveryStockDemoReassemblesComplete) {
  for (const Level& level : testing::stock_levels()) {
    const Puzzle p = shuffle_puzzle(level.demo_building, level.puzzle_seed);
    ASSERT_LE(p.blocks.size(), 8u);
    // Put each block back into the slot its id came from.
    std::vector<BlockId> canonical;
    for (const auto& blk : level.demo_building.base) canonical.push_back(blk.id);
    for (const auto& pr : level.demo_building.prolongations)
      for (const auto& blk : pr.inner) canonical.push_back(blk.id);
    Arrangement arr;
    for (std::size_t s = 0; s < canonical.size(); ++s) arr[static_cast<int>(s)] = canonical[s];
    EXPECT_EQ(check_reconstruction(p, arr).status, ReconstructionResult::Status::Complete) << "level " << level.id;
    // The shuffle is a permutation of the building's blocks.
    std::multiset<std::uint32_t> a, b;
    for (const auto& blk : p.blocks) a.insert(blk.id.value);
    for (BlockId id : canonical) b.insert(id.value);
    EXPECT_EQ(a, b);
  }
}

}  // namespace
}  // namespace hblocks
