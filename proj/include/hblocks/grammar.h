#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hblocks/block.h"
#include "hblocks/errors.h"
#include "hblocks/theory.h"

namespace hblocks {

enum class StructureKind { Natural, Neighbor, Passing };

std::string_view structure_name(StructureKind k);

enum class ProlongationKind { Neighbor, Passing };

std::string_view prolongation_name(ProlongationKind k);
ProlongationKind parse_prolongation_kind(std::string_view text);

inline constexpr int kMaxInnerChords = 2;
inline constexpr int kMinWindow = 3;
inline constexpr int kMaxWindow = 4;

// A layer-one elaboration of the base row. For Neighbor, `anchor` is the base
// index i and the surface is base[i], inner..., base[i]. For Passing, `anchor`
// is the gap between base[i] and base[i+1].
struct Prolongation {
  ProlongationKind kind = ProlongationKind::Neighbor;
  int anchor = 0;
  std::vector<MusicalBlock> inner;

  friend bool operator==(const Prolongation&, const Prolongation&) = default;
};

struct Building {
  Key key;
  std::vector<MusicalBlock> base;
  std::vector<Prolongation> prolongations;

  // Base blocks first, then each prolongation's inner blocks in stored order.
  std::vector<const MusicalBlock*> blocks() const;
  std::size_t block_count() const;

  friend bool operator==(const Building&, const Building&) = default;
};

struct ProlongationSpec {
  ProlongationKind kind = ProlongationKind::Neighbor;
  int anchor = 0;
  std::vector<Degree> inner;
};

// Window predicates shared by the classifier, the builder and the layout
// engine. Windows are the full surface run including both outer chords.
bool is_neighbor_window(std::span<const MusicalBlock> window);
bool is_passing_window(std::span<const MusicalBlock> window);
bool is_neighbor_window(std::span<const Degree> window);
bool is_passing_window(std::span<const Degree> window);
// Roots move by one scale step each hop, all in the same direction, no wrap.
bool is_stepwise_monotone(std::span<const Degree> roots);

// Neighbor > Passing > Natural; nullopt means no structure applies (some
// adjacent pair cannot connect). Throws SequenceTooShort below length 2.
std::optional<StructureKind> classify_segment(std::span<const Degree> seq, const Key& key);

// Default blocks get ids 1..n over the canonical block order.
Building build(const Key& key, std::span<const Degree> base_degrees,
               std::span<const ProlongationSpec> prolongations = {});

// Reassigns block ids 1..n over the canonical block order.
void renumber_blocks(Building& b);

std::vector<Degree> flatten(const Building& b);
std::vector<const MusicalBlock*> flatten_blocks(const Building& b);

struct ParseTree {
  Building root;
  // One label per block in canonical order: Natural for base blocks, the
  // prolongation kind for inner blocks.
  std::vector<StructureKind> labels;
};

// Greedy leftmost-longest reduction; flatten(parse_building(s).root) == s.
ParseTree parse_building(std::span<const Degree> seq, const Key& key);

std::string describe(const Building& b);

struct Violation {
  ErrorCode code;
  int index = 0;
  std::vector<BlockId> blocks;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_building(const Building& b);

// --- Reconstruction puzzle -------------------------------------------------

struct PuzzleSlot {
  int index = 0;
  // 0 = base row, 1 = prolongation layer.
  int row = 0;
  // Base slots: base index. Inner slots: prolongation anchor.
  int anchor = 0;
  std::optional<ProlongationKind> kind;
  // Position within the prolongation's inner list.
  int position = 0;
};

struct Puzzle {
  Building target;
  std::vector<PuzzleSlot> skeleton;
  std::vector<MusicalBlock> blocks;  // shuffled

  Degree target_degree(int slot) const;
  const MusicalBlock* find_block(BlockId id) const;
};

Puzzle shuffle_puzzle(const Building& b, std::uint64_t seed);

// Surface order as slot indices; a neighbor anchor's slot appears twice.
std::vector<int> surface_slots(const Building& b);

using Arrangement = std::map<int, BlockId>;

struct ReconstructionResult {
  enum class Status { Complete, PartialCorrect, Violations };
  Status status = Status::PartialCorrect;
  std::vector<int> correct_slots;
  std::vector<Violation> violations;
};

std::string_view reconstruction_status_name(ReconstructionResult::Status s);

// Grades chord identity per slot. Throws UnknownSlot, UnknownBlock, SlotReuse.
ReconstructionResult check_reconstruction(const Puzzle& puzzle, const Arrangement& arrangement);

}  // namespace hblocks
