#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "hblocks/block.h"
#include "hblocks/grammar.h"

namespace hblocks {

// Geometry constants, in block widths.
struct LayoutConfig {
  double snap_radius = 0.25;
  double block_size = 1.0;
  double tenon_depth = 0.2;

  friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

struct LayoutPosition {
  double x = 0.0;
  // 0 = base row, 1 = prolongation layer.
  int y = 0;

  friend bool operator==(const LayoutPosition&, const LayoutPosition&) = default;
};

// Left/Right extend the base row. Above stacks a neighbor vault over a base
// block; AboveGap stacks a passing run over the gap right of a base block.
enum class Side { Left, Right, Above, AboveGap };

std::string_view side_name(Side s);
Side parse_side(std::string_view text);

struct SnapEvent {
  enum class Kind { None, Attract, Repel };

  Kind kind = Kind::None;
  std::optional<BlockId> target;
  std::optional<Side> side;
  bool click_sound = false;

  static SnapEvent none() { return {}; }
  friend bool operator==(const SnapEvent&, const SnapEvent&) = default;
};

std::string_view snap_kind_name(SnapEvent::Kind k);

class Workspace {
 public:
  struct Entry {
    MusicalBlock block;
    // Floating position of a detached block, if the client reported one.
    std::optional<LayoutPosition> drag_position;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  struct Stack {
    ProlongationKind kind = ProlongationKind::Neighbor;
    // Neighbor: block under the vault. Passing: block left of the gap.
    BlockId anchor;
    std::vector<BlockId> inner;

    friend bool operator==(const Stack&, const Stack&) = default;
  };

  struct State {
    Key key;
    LayoutConfig config;
    std::map<BlockId, Entry> entries;
    std::vector<BlockId> row;
    int origin = 0;
    std::vector<Stack> stacks;
    std::uint64_t next_id = 1;

    friend bool operator==(const State&, const State&) = default;
  };

  explicit Workspace(Key key = c_major(), LayoutConfig config = {});
  static Workspace from_state(State state);

  const State& state() const { return state_; }
  const Key& key() const { return state_.key; }
  const LayoutConfig& config() const { return state_.config; }

  // Adds a detached block under a fresh id and returns it.
  BlockId add_block(MusicalBlock block);
  const MusicalBlock& block(BlockId id) const;
  bool contains(BlockId id) const;
  bool is_detached(BlockId id) const;
  std::vector<BlockId> detached() const;
  std::vector<BlockId> base_row() const { return state_.row; }
  std::vector<Degree> base_degrees() const;
  std::optional<LayoutPosition> position(BlockId id) const;

  // Starts the base row with a detached block at grid column round(x).
  void place_first(BlockId id, double x);
  void move_detached(BlockId id, LayoutPosition pos);

  SnapEvent probe(BlockId moving, LayoutPosition pos) const;
  // Throws IncompatibleConnection, SlotOccupied, UnknownBlock, BlockNotDetached.
  void attach(BlockId moving, BlockId target, Side side);
  // Only row ends and the top of a stack can be lifted off.
  void detach(BlockId id);
  // Deletes a detached block.
  void remove(BlockId id);

  Building to_building() const;

  friend bool operator==(const Workspace&, const Workspace&) = default;

 private:
  enum class SlotCheck { Ok, Incompatible, Occupied, NoSlot };
  SlotCheck check_slot(const MusicalBlock& moving, BlockId target, Side side) const;
  int row_index(BlockId id) const;
  const Stack* find_stack(ProlongationKind kind, BlockId anchor) const;
  Stack* find_stack(ProlongationKind kind, BlockId anchor);
  const Entry& entry(BlockId id) const;

  State state_;
};

SnapEvent probe(const Workspace& ws, BlockId moving, LayoutPosition pos);
Workspace attach(Workspace ws, BlockId moving, BlockId target, Side side);

}  // namespace hblocks
