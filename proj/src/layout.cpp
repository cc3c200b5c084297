#include "hblocks/layout.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "hblocks/errors.h"

namespace hblocks {

namespace {

std::string id_text(BlockId id) { return std::to_string(id.value); }

constexpr double kDistanceEpsilon = 1e-9;

}  // namespace

std::string_view side_name(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Above: return "above";
    case Side::AboveGap: return "above_gap";
  }
  return "?";
}

Side parse_side(std::string_view text) {
  if (text == "left") return Side::Left;
  if (text == "right") return Side::Right;
  if (text == "above") return Side::Above;
  if (text == "above_gap") return Side::AboveGap;
  throw Error(ErrorCode::SchemaViolation, "unknown side: '" + std::string(text) + "'");
}

std::string_view snap_kind_name(SnapEvent::Kind k) {
  switch (k) {
    case SnapEvent::Kind::None: return "none";
    case SnapEvent::Kind::Attract: return "attract";
    case SnapEvent::Kind::Repel: return "repel";
  }
  return "?";
}

Workspace::Workspace(Key key, LayoutConfig config) {
  state_.key = key;
  state_.config = config;
}

Workspace Workspace::from_state(State state) {
  Workspace ws;
  ws.state_ = std::move(state);
  return ws;
}

BlockId Workspace::add_block(MusicalBlock block) {
  const BlockId id{state_.next_id++};
  block.id = id;
  state_.entries.emplace(id, Entry{block, std::nullopt});
  return id;
}

const Workspace::Entry& Workspace::entry(BlockId id) const {
  auto it = state_.entries.find(id);
  if (it == state_.entries.end()) throw Error(ErrorCode::UnknownBlock, "unknown block " + id_text(id));
  return it->second;
}

const MusicalBlock& Workspace::block(BlockId id) const { return entry(id).block; }

bool Workspace::contains(BlockId id) const { return state_.entries.count(id) != 0; }

int Workspace::row_index(BlockId id) const {
  auto it = std::find(state_.row.begin(), state_.row.end(), id);
  return it == state_.row.end() ? -1 : static_cast<int>(it - state_.row.begin());
}

const Workspace::Stack* Workspace::find_stack(ProlongationKind kind, BlockId anchor) const {
  for (const auto& s : state_.stacks)
    if (s.kind == kind && s.anchor == anchor) return &s;
  return nullptr;
}

Workspace::Stack* Workspace::find_stack(ProlongationKind kind, BlockId anchor) {
  for (auto& s : state_.stacks)
    if (s.kind == kind && s.anchor == anchor) return &s;
  return nullptr;
}

bool Workspace::is_detached(BlockId id) const {
  entry(id);
  if (row_index(id) >= 0) return false;
  for (const auto& s : state_.stacks)
    if (std::find(s.inner.begin(), s.inner.end(), id) != s.inner.end()) return false;
  return true;
}

std::vector<BlockId> Workspace::detached() const {
  std::vector<BlockId> out;
  for (const auto& [id, e] : state_.entries)
    if (is_detached(id)) out.push_back(id);
  return out;
}

std::vector<Degree> Workspace::base_degrees() const {
  std::vector<Degree> out;
  for (BlockId id : state_.row) out.push_back(block(id).degree);
  return out;
}

std::optional<LayoutPosition> Workspace::position(BlockId id) const {
  const Entry& e = entry(id);
  if (int i = row_index(id); i >= 0) return LayoutPosition{static_cast<double>(state_.origin + i), 0};
  for (const auto& s : state_.stacks) {
    if (std::find(s.inner.begin(), s.inner.end(), id) == s.inner.end()) continue;
    const double x = state_.origin + row_index(s.anchor) + (s.kind == ProlongationKind::Passing ? 0.5 : 0.0);
    return LayoutPosition{x, 1};
  }
  return e.drag_position;
}

void Workspace::place_first(BlockId id, double x) {
  if (!is_detached(id)) throw Error(ErrorCode::BlockNotDetached, "block " + id_text(id) + " is already placed");
  if (!state_.row.empty()) throw Error(ErrorCode::SlotOccupied, "the base row already has blocks");
  state_.row.push_back(id);
  state_.origin = static_cast<int>(std::lround(x));
  state_.entries.at(id).drag_position.reset();
}

void Workspace::move_detached(BlockId id, LayoutPosition pos) {
  if (!is_detached(id)) throw Error(ErrorCode::BlockNotDetached, "block " + id_text(id) + " is placed");
  state_.entries.at(id).drag_position = pos;
}

Workspace::SlotCheck Workspace::check_slot(const MusicalBlock& moving, BlockId target, Side side) const {
  const int i = row_index(target);
  if (i < 0) return SlotCheck::NoSlot;
  const MusicalBlock& anchor = block(target);
  const int n = static_cast<int>(state_.row.size());
  switch (side) {
    case Side::Left:
      if (i != 0) return SlotCheck::Occupied;
      return can_connect(moving, anchor) ? SlotCheck::Ok : SlotCheck::Incompatible;
    case Side::Right:
      if (i != n - 1) return SlotCheck::Occupied;
      return can_connect(anchor, moving) ? SlotCheck::Ok : SlotCheck::Incompatible;
    case Side::Above: {
      const Stack* s = find_stack(ProlongationKind::Neighbor, target);
      if (s && static_cast<int>(s->inner.size()) >= kMaxInnerChords) return SlotCheck::Occupied;
      const MusicalBlock& pred = (s && !s->inner.empty()) ? block(s->inner.back()) : anchor;
      if (moving.degree == anchor.degree || !can_connect(pred, moving)) return SlotCheck::Incompatible;
      return SlotCheck::Ok;
    }
    case Side::AboveGap: {
      if (i >= n - 1) return SlotCheck::NoSlot;
      const Stack* s = find_stack(ProlongationKind::Passing, target);
      if (s && static_cast<int>(s->inner.size()) >= kMaxInnerChords) return SlotCheck::Occupied;
      std::vector<Degree> run{anchor.degree};
      if (s)
        for (BlockId id : s->inner) run.push_back(block(id).degree);
      run.push_back(moving.degree);
      const MusicalBlock& pred = (s && !s->inner.empty()) ? block(s->inner.back()) : anchor;
      if (!is_stepwise_monotone(run) || !can_connect(pred, moving)) return SlotCheck::Incompatible;
      return SlotCheck::Ok;
    }
  }
  return SlotCheck::NoSlot;
}

SnapEvent Workspace::probe(BlockId moving, LayoutPosition pos) const {
  const MusicalBlock& m = block(moving);
  if (!is_detached(moving)) throw Error(ErrorCode::BlockNotDetached, "block " + id_text(moving) + " is placed");

  struct Candidate {
    double distance;
    double slot_x;
    BlockId target;
    Side side;
  };
  std::optional<Candidate> best;
  auto consider = [&](BlockId target, Side side, double sx, int sy) {
    const double dist = std::hypot(pos.x - sx, static_cast<double>(pos.y - sy));
    if (dist > state_.config.snap_radius + kDistanceEpsilon) return;
    const SlotCheck check = check_slot(m, target, side);
    if (check == SlotCheck::Occupied || check == SlotCheck::NoSlot) return;
    Candidate c{dist, sx, target, side};
    if (!best || std::tie(c.distance, c.slot_x, c.target.value) < std::tie(best->distance, best->slot_x, best->target.value))
      best = c;
  };

  const int n = static_cast<int>(state_.row.size());
  for (int i = 0; i < n; ++i) {
    const BlockId id = state_.row[static_cast<std::size_t>(i)];
    const double x = state_.origin + i;
    if (i == 0) consider(id, Side::Left, x - 1.0, 0);
    if (i == n - 1) consider(id, Side::Right, x + 1.0, 0);
    consider(id, Side::Above, x, 1);
    if (i < n - 1) consider(id, Side::AboveGap, x + 0.5, 1);
  }
  if (!best) return SnapEvent::none();
  const bool ok = check_slot(m, best->target, best->side) == SlotCheck::Ok;
  return SnapEvent{ok ? SnapEvent::Kind::Attract : SnapEvent::Kind::Repel, best->target,
                   ok ? std::optional<Side>(best->side) : std::nullopt, ok};
}

void Workspace::attach(BlockId moving, BlockId target, Side side) {
  const MusicalBlock& m = block(moving);
  if (!is_detached(moving)) throw Error(ErrorCode::BlockNotDetached, "block " + id_text(moving) + " is placed");
  if (!contains(target)) throw Error(ErrorCode::UnknownBlock, "unknown target block " + id_text(target));
  switch (check_slot(m, target, side)) {
    case SlotCheck::Ok: break;
    case SlotCheck::Incompatible:
      throw Error(ErrorCode::IncompatibleConnection, std::string(roman_label(m.degree)) + " cannot attach " +
                                                         std::string(side_name(side)) + " of " +
                                                         std::string(roman_label(block(target).degree)));
    case SlotCheck::Occupied:
      throw Error(ErrorCode::SlotOccupied, "slot " + std::string(side_name(side)) + " of block " + id_text(target) +
                                               " is occupied");
    case SlotCheck::NoSlot:
      throw Error(ErrorCode::UnknownSlot, "block " + id_text(target) + " has no " + std::string(side_name(side)) +
                                              " slot");
  }
  switch (side) {
    case Side::Left:
      state_.row.insert(state_.row.begin(), moving);
      --state_.origin;
      break;
    case Side::Right: state_.row.push_back(moving); break;
    case Side::Above:
    case Side::AboveGap: {
      const auto kind = side == Side::Above ? ProlongationKind::Neighbor : ProlongationKind::Passing;
      Stack* s = find_stack(kind, target);
      if (!s) {
        state_.stacks.push_back(Stack{kind, target, {}});
        s = &state_.stacks.back();
      }
      s->inner.push_back(moving);
      break;
    }
  }
  state_.entries.at(moving).drag_position.reset();
}

void Workspace::detach(BlockId id) {
  entry(id);
  for (auto it = state_.stacks.begin(); it != state_.stacks.end(); ++it) {
    if (!it->inner.empty() && it->inner.back() == id) {
      it->inner.pop_back();
      if (it->inner.empty()) state_.stacks.erase(it);
      return;
    }
  }
  const int i = row_index(id);
  const int n = static_cast<int>(state_.row.size());
  if (i < 0 || (i != 0 && i != n - 1))
    throw Error(ErrorCode::SlotOccupied, "block " + id_text(id) + " is held in place by its neighbours");
  const bool carries = std::any_of(state_.stacks.begin(), state_.stacks.end(), [&](const Stack& s) {
    return s.anchor == id || (s.kind == ProlongationKind::Passing && i > 0 && s.anchor == state_.row[i - 1]);
  });
  if (carries) throw Error(ErrorCode::SlotOccupied, "block " + id_text(id) + " supports a prolongation");
  state_.row.erase(state_.row.begin() + i);
  if (i == 0) ++state_.origin;
}

void Workspace::remove(BlockId id) {
  if (!is_detached(id)) throw Error(ErrorCode::BlockNotDetached, "block " + id_text(id) + " is placed");
  state_.entries.erase(id);
}

Building Workspace::to_building() const {
  Building b{state_.key, {}, {}};
  for (BlockId id : state_.row) b.base.push_back(block(id));
  std::vector<Prolongation> ps;
  for (const auto& s : state_.stacks) {
    Prolongation p{s.kind, row_index(s.anchor), {}};
    for (BlockId id : s.inner) p.inner.push_back(block(id));
    ps.push_back(std::move(p));
  }
  std::stable_sort(ps.begin(), ps.end(), [](const Prolongation& a, const Prolongation& b) {
    return std::tie(a.anchor, a.kind) < std::tie(b.anchor, b.kind);
  });
  b.prolongations = std::move(ps);
  return b;
}

SnapEvent probe(const Workspace& ws, BlockId moving, LayoutPosition pos) { return ws.probe(moving, pos); }

Workspace attach(Workspace ws, BlockId moving, BlockId target, Side side) {
  ws.attach(moving, target, side);
  return ws;
}

}  // namespace hblocks
