#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "hblocks/theory.h"

namespace hblocks {

enum class Shape { Square, Triangle, Circle };

std::string_view shape_name(Shape s);

// Square = tonic, Triangle = dominant, Circle = subdominant.
Shape shape_for(HarmonicFunction f);

struct BlockSymbol {
  enum class Composition { Single, Doubled, Overlap };

  Composition composition = Composition::Single;
  Shape primary = Shape::Square;
  // Only meaningful for Overlap.
  Shape secondary = Shape::Square;

  static BlockSymbol single(Shape s) { return {Composition::Single, s, s}; }
  static BlockSymbol doubled(Shape s) { return {Composition::Doubled, s, s}; }
  static BlockSymbol overlap(Shape a, Shape b) { return {Composition::Overlap, a, b}; }

  friend bool operator==(const BlockSymbol&, const BlockSymbol&) = default;
};

std::string_view composition_name(BlockSymbol::Composition c);
std::string describe(const BlockSymbol& s);

BlockSymbol symbol_for(Degree deg);

// Functions permitted to follow a chord with this profile: union over its
// functions of T->{T,S,D}, S->{S,D,T}, D->{D,T}.
FunctionSet successor_table(const FunctionProfile& profile);

struct BlockId {
  std::uint64_t value = 0;
  friend auto operator<=>(const BlockId&, const BlockId&) = default;
};

struct TenonProfile {
  FunctionSet allowed_successor_functions;
  friend bool operator==(const TenonProfile&, const TenonProfile&) = default;
};

struct MortiseProfile {
  FunctionSet accepted_own_functions;
  friend bool operator==(const MortiseProfile&, const MortiseProfile&) = default;
};

struct MusicalBlock {
  BlockId id;
  Degree degree = Degree::I;
  TenonProfile tenon;
  MortiseProfile mortise;
  BlockSymbol symbol;

  friend bool operator==(const MusicalBlock&, const MusicalBlock&) = default;
};

TenonProfile default_tenon(Degree deg);
MortiseProfile default_mortise(Degree deg);

// Omitted profiles take the defaults. An explicit tenon must be a nonempty
// subset of the default; an explicit mortise must equal it.
MusicalBlock make_block(Degree deg, std::optional<TenonProfile> tenon = std::nullopt,
                        std::optional<MortiseProfile> mortise = std::nullopt, BlockId id = {});

bool can_connect(const MusicalBlock& a, const MusicalBlock& b);

// Connectability of default blocks, indexed [from][to] by degree - 1.
using CompatibilityMatrix = std::array<std::array<bool, 7>, 7>;
CompatibilityMatrix compatibility_matrix(const Key& key);

// Same relation over degrees, without constructing blocks.
bool degrees_connect(Degree a, Degree b);

}  // namespace hblocks
