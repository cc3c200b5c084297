#include "hblocks/block.h"

#include "hblocks/errors.h"

namespace hblocks {

std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::Square: return "square";
    case Shape::Triangle: return "triangle";
    case Shape::Circle: return "circle";
  }
  return "?";
}

Shape shape_for(HarmonicFunction f) {
  switch (f) {
    case HarmonicFunction::Tonic: return Shape::Square;
    case HarmonicFunction::Dominant: return Shape::Triangle;
    case HarmonicFunction::Subdominant: return Shape::Circle;
  }
  return Shape::Square;
}

std::string_view composition_name(BlockSymbol::Composition c) {
  switch (c) {
    case BlockSymbol::Composition::Single: return "single";
    case BlockSymbol::Composition::Doubled: return "doubled";
    case BlockSymbol::Composition::Overlap: return "overlap";
  }
  return "?";
}

std::string describe(const BlockSymbol& s) {
  std::string out(composition_name(s.composition));
  out += "(";
  out += shape_name(s.primary);
  if (s.composition == BlockSymbol::Composition::Overlap) {
    out += ",";
    out += shape_name(s.secondary);
  }
  return out + ")";
}

BlockSymbol symbol_for(Degree deg) {
  const FunctionProfile profile = functions_of(deg);
  if (profile.functions.size() == 2) {
    // Tonic is always one half of a dual profile and is drawn first.
    Shape other = Shape::Square;
    profile.functions.for_each([&](HarmonicFunction f) {
      if (f != HarmonicFunction::Tonic) other = shape_for(f);
    });
    return BlockSymbol::overlap(Shape::Square, other);
  }
  Shape shape = Shape::Square;
  profile.functions.for_each([&](HarmonicFunction f) { shape = shape_for(f); });
  return profile.strength == Strength::Strong ? BlockSymbol::doubled(shape) : BlockSymbol::single(shape);
}

FunctionSet successor_table(const FunctionProfile& profile) {
  using HF = HarmonicFunction;
  FunctionSet out;
  profile.functions.for_each([&](HF f) {
    switch (f) {
      case HF::Tonic: out = out | FunctionSet{HF::Tonic, HF::Subdominant, HF::Dominant}; break;
      case HF::Subdominant: out = out | FunctionSet{HF::Subdominant, HF::Dominant, HF::Tonic}; break;
      case HF::Dominant: out = out | FunctionSet{HF::Dominant, HF::Tonic}; break;
    }
  });
  return out;
}

TenonProfile default_tenon(Degree deg) { return {successor_table(functions_of(deg))}; }

MortiseProfile default_mortise(Degree deg) { return {functions_of(deg).functions}; }

MusicalBlock make_block(Degree deg, std::optional<TenonProfile> tenon, std::optional<MortiseProfile> mortise,
                        BlockId id) {
  const TenonProfile tenon_default = default_tenon(deg);
  const MortiseProfile mortise_default = default_mortise(deg);
  if (tenon) {
    const FunctionSet& fs = tenon->allowed_successor_functions;
    if (fs.empty() || !fs.subset_of(tenon_default.allowed_successor_functions))
      throw Error(ErrorCode::InvalidTenon, "tenon " + describe(fs) + " not permitted for " +
                                               std::string(roman_label(deg)) + "; allowed subsets of " +
                                               describe(tenon_default.allowed_successor_functions));
  }
  if (mortise && !(*mortise == mortise_default))
    throw Error(ErrorCode::InvalidMortise, "mortise " + describe(mortise->accepted_own_functions) +
                                               " does not match the functions of " + std::string(roman_label(deg)));
  return MusicalBlock{id, deg, tenon.value_or(tenon_default), mortise_default, symbol_for(deg)};
}

bool can_connect(const MusicalBlock& a, const MusicalBlock& b) {
  return a.tenon.allowed_successor_functions.intersects(b.mortise.accepted_own_functions);
}

bool degrees_connect(Degree a, Degree b) {
  return default_tenon(a).allowed_successor_functions.intersects(default_mortise(b).accepted_own_functions);
}

CompatibilityMatrix compatibility_matrix(const Key& /*key*/) {
  // Connectability depends only on function profiles, which are the same in
  // every major key.
  CompatibilityMatrix m{};
  for (Degree a : kAllDegrees) {
    const MusicalBlock from = make_block(a);
    for (Degree b : kAllDegrees)
      m[degree_number(a) - 1][degree_number(b) - 1] = can_connect(from, make_block(b));
  }
  return m;
}

}  // namespace hblocks
