#include "hblocks/grammar.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace hblocks {

namespace {

std::string label(Degree d) { return std::string(roman_label(d)); }

std::vector<Degree> degrees_of(std::span<const MusicalBlock> blocks) {
  std::vector<Degree> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(b.degree);
  return out;
}

bool chain_connects(std::span<const MusicalBlock> window) {
  for (std::size_t i = 0; i + 1 < window.size(); ++i)
    if (!can_connect(window[i], window[i + 1])) return false;
  return true;
}

bool chain_connects(std::span<const Degree> window) {
  for (std::size_t i = 0; i + 1 < window.size(); ++i)
    if (!degrees_connect(window[i], window[i + 1])) return false;
  return true;
}

bool window_size_ok(std::size_t n) { return n >= kMinWindow && n <= kMaxWindow; }

bool neighbor_shape(std::span<const Degree> w) {
  if (!window_size_ok(w.size()) || w.front() != w.back()) return false;
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (w[i] == w.front()) return false;
  return true;
}

// Unbiased draw in [0, n) from a 64-bit engine; std distributions are
// implementation-defined and would break seed reproducibility across toolchains.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

}  // namespace

std::string_view structure_name(StructureKind k) {
  switch (k) {
    case StructureKind::Natural: return "natural";
    case StructureKind::Neighbor: return "neighbor";
    case StructureKind::Passing: return "passing";
  }
  return "?";
}

std::string_view prolongation_name(ProlongationKind k) {
  return k == ProlongationKind::Neighbor ? "neighbor" : "passing";
}

ProlongationKind parse_prolongation_kind(std::string_view text) {
  if (text == "neighbor") return ProlongationKind::Neighbor;
  if (text == "passing") return ProlongationKind::Passing;
  throw Error(ErrorCode::SchemaViolation, "unknown prolongation kind: '" + std::string(text) + "'");
}

std::vector<const MusicalBlock*> Building::blocks() const {
  std::vector<const MusicalBlock*> out;
  out.reserve(block_count());
  for (const auto& b : base) out.push_back(&b);
  for (const auto& p : prolongations)
    for (const auto& b : p.inner) out.push_back(&b);
  return out;
}

std::size_t Building::block_count() const {
  std::size_t n = base.size();
  for (const auto& p : prolongations) n += p.inner.size();
  return n;
}

bool is_stepwise_monotone(std::span<const Degree> roots) {
  if (roots.size() < 2) return false;
  const int dir = degree_number(roots[1]) - degree_number(roots[0]);
  if (dir != 1 && dir != -1) return false;
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (degree_number(roots[i]) - degree_number(roots[i - 1]) != dir) return false;
  return true;
}

bool is_neighbor_window(std::span<const Degree> window) {
  return neighbor_shape(window) && chain_connects(window);
}

bool is_passing_window(std::span<const Degree> window) {
  return window_size_ok(window.size()) && is_stepwise_monotone(window) && chain_connects(window);
}

bool is_neighbor_window(std::span<const MusicalBlock> window) {
  const auto degs = degrees_of(window);
  return neighbor_shape(degs) && chain_connects(window);
}

bool is_passing_window(std::span<const MusicalBlock> window) {
  const auto degs = degrees_of(window);
  return window_size_ok(degs.size()) && is_stepwise_monotone(degs) && chain_connects(window);
}

std::optional<StructureKind> classify_segment(std::span<const Degree> seq, const Key& /*key*/) {
  if (seq.size() < 2)
    throw Error(ErrorCode::SequenceTooShort, "a segment needs at least two chords");
  if (!chain_connects(seq)) return std::nullopt;
  if (is_neighbor_window(seq)) return StructureKind::Neighbor;
  if (is_passing_window(seq)) return StructureKind::Passing;
  return StructureKind::Natural;
}

// --- Building construction and validation ---------------------------------

ValidationReport validate_building(const Building& b) {
  ValidationReport report;
  auto add = [&](ErrorCode code, int index, std::vector<BlockId> ids, std::string msg) {
    report.violations.push_back(Violation{code, index, std::move(ids), std::move(msg)});
  };

  const int n = static_cast<int>(b.base.size());
  if (n == 0) add(ErrorCode::EmptyBase, 0, {}, "building has no base blocks");

  for (int i = 0; i + 1 < n; ++i) {
    const auto& l = b.base[i];
    const auto& r = b.base[i + 1];
    if (!can_connect(l, r))
      add(ErrorCode::BaseBreak, i, {l.id, r.id},
          "base " + label(l.degree) + " -> " + label(r.degree) + " at " + std::to_string(i) + " cannot connect");
  }

  std::set<std::pair<ProlongationKind, int>> seen;
  for (const auto& p : b.prolongations) {
    std::vector<BlockId> ids;
    for (const auto& blk : p.inner) ids.push_back(blk.id);
    const bool neighbor = p.kind == ProlongationKind::Neighbor;
    const std::string what = std::string(prolongation_name(p.kind)) + " at " + std::to_string(p.anchor);

    const int max_anchor = neighbor ? n - 1 : n - 2;
    if (p.anchor < 0 || p.anchor > max_anchor) {
      add(ErrorCode::AnchorOutOfRange, p.anchor, ids, what + " is outside the base row");
      continue;
    }
    if (!seen.insert({p.kind, p.anchor}).second) {
      add(ErrorCode::AnchorConflict, p.anchor, ids, what + " duplicates an existing prolongation");
      continue;
    }
    const ErrorCode bad = neighbor ? ErrorCode::BadNeighbor : ErrorCode::BadPassing;
    if (p.inner.empty() || static_cast<int>(p.inner.size()) > kMaxInnerChords) {
      add(bad, p.anchor, ids, what + " must hold 1-2 inner chords");
      continue;
    }
    std::vector<MusicalBlock> window;
    window.push_back(b.base[p.anchor]);
    window.insert(window.end(), p.inner.begin(), p.inner.end());
    window.push_back(neighbor ? b.base[p.anchor] : b.base[p.anchor + 1]);
    const bool ok = neighbor ? is_neighbor_window(window) : is_passing_window(window);
    if (!ok) {
      std::string msg = what + " is not a valid " + std::string(prolongation_name(p.kind)) + " progression:";
      for (const auto& blk : window) msg += " " + label(blk.degree);
      add(bad, p.anchor, ids, msg);
    }
  }
  return report;
}

Building build(const Key& key, std::span<const Degree> base_degrees, std::span<const ProlongationSpec> specs) {
  Building b{key, {}, {}};
  std::uint64_t next_id = 1;
  for (Degree d : base_degrees) b.base.push_back(make_block(d, std::nullopt, std::nullopt, BlockId{next_id++}));
  for (const auto& spec : specs) {
    Prolongation p{spec.kind, spec.anchor, {}};
    for (Degree d : spec.inner) p.inner.push_back(make_block(d, std::nullopt, std::nullopt, BlockId{next_id++}));
    b.prolongations.push_back(std::move(p));
  }
  const ValidationReport report = validate_building(b);
  if (!report.ok()) {
    const Violation& v = report.violations.front();
    throw Error(v.code, v.message, v.index);
  }
  return b;
}

void renumber_blocks(Building& b) {
  std::uint64_t next = 1;
  for (auto& blk : b.base) blk.id = BlockId{next++};
  for (auto& p : b.prolongations)
    for (auto& blk : p.inner) blk.id = BlockId{next++};
}

namespace {

template <typename Emit>
void walk_surface(const Building& b, Emit&& emit) {
  const int n = static_cast<int>(b.base.size());
  auto find = [&](ProlongationKind kind, int anchor) -> const Prolongation* {
    for (const auto& p : b.prolongations)
      if (p.kind == kind && p.anchor == anchor) return &p;
    return nullptr;
  };
  // Inner blocks are numbered after the base in canonical order.
  std::vector<int> first_slot(b.prolongations.size());
  int slot = n;
  for (std::size_t k = 0; k < b.prolongations.size(); ++k) {
    first_slot[k] = slot;
    slot += static_cast<int>(b.prolongations[k].inner.size());
  }
  auto slot_of = [&](const Prolongation* p, int pos) {
    return first_slot[static_cast<std::size_t>(p - b.prolongations.data())] + pos;
  };
  for (int i = 0; i < n; ++i) {
    emit(i, b.base[i]);
    if (const Prolongation* p = find(ProlongationKind::Neighbor, i)) {
      for (std::size_t k = 0; k < p->inner.size(); ++k) emit(slot_of(p, static_cast<int>(k)), p->inner[k]);
      emit(i, b.base[i]);
    }
    if (const Prolongation* p = find(ProlongationKind::Passing, i)) {
      for (std::size_t k = 0; k < p->inner.size(); ++k) emit(slot_of(p, static_cast<int>(k)), p->inner[k]);
    }
  }
}

}  // namespace

std::vector<Degree> flatten(const Building& b) {
  std::vector<Degree> out;
  walk_surface(b, [&](int, const MusicalBlock& blk) { out.push_back(blk.degree); });
  return out;
}

std::vector<const MusicalBlock*> flatten_blocks(const Building& b) {
  std::vector<const MusicalBlock*> out;
  walk_surface(b, [&](int, const MusicalBlock& blk) { out.push_back(&blk); });
  return out;
}

std::vector<int> surface_slots(const Building& b) {
  std::vector<int> out;
  walk_surface(b, [&](int slot, const MusicalBlock&) { out.push_back(slot); });
  return out;
}

ParseTree parse_building(std::span<const Degree> seq, const Key& key) {
  if (seq.empty()) throw Error(ErrorCode::SequenceTooShort, "cannot parse an empty sequence");
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!degrees_connect(seq[i], seq[i + 1]))
      throw Error(ErrorCode::UnparseableSequence,
                  label(seq[i]) + " -> " + label(seq[i + 1]) + " at " + std::to_string(i) + " cannot connect",
                  static_cast<int>(i));

  std::vector<Degree> base;
  std::vector<ProlongationSpec> specs;
  const std::size_t n = seq.size();
  std::size_t pos = 0;
  while (pos < n) {
    const int anchor = static_cast<int>(base.size());
    base.push_back(seq[pos]);
    bool reduced = false;
    for (std::size_t len = kMaxWindow; len >= kMinWindow && !reduced; --len) {
      if (pos + len > n) continue;
      const auto window = seq.subspan(pos, len);
      if (is_neighbor_window(window)) {
        specs.push_back({ProlongationKind::Neighbor, anchor, {window.begin() + 1, window.end() - 1}});
        pos += len;
        reduced = true;
      }
    }
    for (std::size_t len = kMaxWindow; len >= kMinWindow && !reduced; --len) {
      if (pos + len > n) continue;
      const auto window = seq.subspan(pos, len);
      if (is_passing_window(window)) {
        specs.push_back({ProlongationKind::Passing, anchor, {window.begin() + 1, window.end() - 1}});
        // The closing chord becomes the next base element.
        pos += len - 1;
        reduced = true;
      }
    }
    if (!reduced) ++pos;
  }

  ParseTree tree{build(key, base, specs), {}};
  tree.labels.assign(tree.root.base.size(), StructureKind::Natural);
  for (const auto& p : tree.root.prolongations)
    tree.labels.insert(tree.labels.end(), p.inner.size(),
                       p.kind == ProlongationKind::Neighbor ? StructureKind::Neighbor : StructureKind::Passing);
  return tree;
}

std::string describe(const Building& b) {
  std::ostringstream os;
  os << "base [";
  for (std::size_t i = 0; i < b.base.size(); ++i) os << (i ? " " : "") << roman_label(b.base[i].degree);
  os << "]";
  for (const auto& p : b.prolongations) {
    os << " " << (p.kind == ProlongationKind::Neighbor ? "Neighbor" : "Passing") << "(" << p.anchor << ", [";
    for (std::size_t i = 0; i < p.inner.size(); ++i) os << (i ? " " : "") << roman_label(p.inner[i].degree);
    os << "])";
  }
  return os.str();
}

// --- Puzzle ----------------------------------------------------------------

Degree Puzzle::target_degree(int slot) const {
  const auto blocks = target.blocks();
  if (slot < 0 || slot >= static_cast<int>(blocks.size()))
    throw Error(ErrorCode::UnknownSlot, "no slot " + std::to_string(slot), slot);
  return blocks[static_cast<std::size_t>(slot)]->degree;
}

const MusicalBlock* Puzzle::find_block(BlockId id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

Puzzle shuffle_puzzle(const Building& b, std::uint64_t seed) {
  Puzzle puzzle{b, {}, {}};
  int index = 0;
  for (std::size_t i = 0; i < b.base.size(); ++i)
    puzzle.skeleton.push_back(PuzzleSlot{index++, 0, static_cast<int>(i), std::nullopt, 0});
  for (const auto& p : b.prolongations)
    for (std::size_t k = 0; k < p.inner.size(); ++k)
      puzzle.skeleton.push_back(PuzzleSlot{index++, 1, p.anchor, p.kind, static_cast<int>(k)});

  for (const MusicalBlock* blk : b.blocks()) puzzle.blocks.push_back(*blk);
  std::mt19937_64 rng(seed);
  for (std::size_t i = puzzle.blocks.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_draw(rng, i));
    std::swap(puzzle.blocks[i - 1], puzzle.blocks[j]);
  }
  return puzzle;
}

std::string_view reconstruction_status_name(ReconstructionResult::Status s) {
  switch (s) {
    case ReconstructionResult::Status::Complete: return "complete";
    case ReconstructionResult::Status::PartialCorrect: return "partial_correct";
    case ReconstructionResult::Status::Violations: return "violations";
  }
  return "?";
}

ReconstructionResult check_reconstruction(const Puzzle& puzzle, const Arrangement& arrangement) {
  const int slot_count = static_cast<int>(puzzle.skeleton.size());
  std::set<BlockId> used;
  std::vector<const MusicalBlock*> placed(static_cast<std::size_t>(slot_count), nullptr);
  for (const auto& [slot, id] : arrangement) {
    if (slot < 0 || slot >= slot_count)
      throw Error(ErrorCode::UnknownSlot, "no slot " + std::to_string(slot), slot);
    const MusicalBlock* blk = puzzle.find_block(id);
    if (!blk) throw Error(ErrorCode::UnknownBlock, "block " + std::to_string(id.value) + " is not in the puzzle");
    if (!used.insert(id).second)
      throw Error(ErrorCode::SlotReuse, "block " + std::to_string(id.value) + " placed in more than one slot", slot);
    placed[static_cast<std::size_t>(slot)] = blk;
  }

  ReconstructionResult result;
  for (int s = 0; s < slot_count; ++s) {
    const MusicalBlock* blk = placed[static_cast<std::size_t>(s)];
    if (blk && blk->degree == puzzle.target_degree(s)) result.correct_slots.push_back(s);
  }
  if (static_cast<int>(result.correct_slots.size()) == slot_count) {
    result.status = ReconstructionResult::Status::Complete;
    return result;
  }

  const std::vector<int> order = surface_slots(puzzle.target);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const MusicalBlock* a = placed[static_cast<std::size_t>(order[i])];
    const MusicalBlock* b = placed[static_cast<std::size_t>(order[i + 1])];
    if (a && b && !can_connect(*a, *b))
      result.violations.push_back(Violation{ErrorCode::IncompatibleConnection, order[i], {a->id, b->id},
                                            label(a->degree) + " in slot " + std::to_string(order[i]) +
                                                " cannot connect to " + label(b->degree) + " in slot " +
                                                std::to_string(order[i + 1])});
  }
  result.status = result.violations.empty() ? ReconstructionResult::Status::PartialCorrect
                                            : ReconstructionResult::Status::Violations;
  return result;
}

}  // namespace hblocks
