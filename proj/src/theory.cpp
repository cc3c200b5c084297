#include "hblocks/theory.h"

#include <string>

#include "hblocks/errors.h"

namespace hblocks {

namespace {

constexpr std::array<std::string_view, 12> kSharpNames = {"C",  "C#", "D",  "D#", "E",  "F",
                                                          "F#", "G",  "G#", "A",  "A#", "B"};
constexpr std::array<std::string_view, 12> kFlatNames = {"C",  "Db", "D",  "Eb", "E",  "F",
                                                         "Gb", "G",  "Ab", "A",  "Bb", "B"};

// Semitone steps W-W-H-W-W-W-H.
constexpr std::array<int, 7> kMajorSteps = {2, 2, 1, 2, 2, 2, 1};

// Keys spelled with flats: F, Bb, Eb, Ab, Db.
constexpr bool key_prefers_flats(int tonic_pc) {
  return tonic_pc == 5 || tonic_pc == 10 || tonic_pc == 3 || tonic_pc == 8 || tonic_pc == 1;
}

constexpr std::array<std::string_view, 7> kRomanLabels = {"I", "ii", "iii", "IV", "V", "vi", "vii"};

}  // namespace

std::string_view PitchClass::spelled_name() const {
  return flats_ ? kFlatNames[value_] : kSharpNames[value_];
}

Key c_major() { return major_key(0); }

Key major_key(int tonic_pc) {
  const int pc = ((tonic_pc % 12) + 12) % 12;
  return Key{PitchClass(pc, key_prefers_flats(pc)), Mode::Major};
}

Key parse_key(std::string_view text) {
  std::string_view name = text;
  constexpr std::string_view kSuffix = " major";
  if (name.size() > kSuffix.size() && name.substr(name.size() - kSuffix.size()) == kSuffix)
    name.remove_suffix(kSuffix.size());
  for (int pc = 0; pc < 12; ++pc) {
    const Key key = major_key(pc);
    if (key.name() == name) return key;
  }
  throw Error(ErrorCode::UnknownKey, "unknown key: " + std::string(text));
}

Degree degree_from_number(int n) {
  if (n < 1 || n > 7) throw Error(ErrorCode::UnknownDegree, "degree out of range: " + std::to_string(n));
  return static_cast<Degree>(n);
}

std::string_view roman_label(Degree d) { return kRomanLabels[static_cast<std::size_t>(degree_number(d) - 1)]; }

Degree parse_degree(std::string_view text) {
  for (std::size_t i = 0; i < kRomanLabels.size(); ++i)
    if (kRomanLabels[i] == text) return static_cast<Degree>(i + 1);
  throw Error(ErrorCode::UnknownDegree, "unknown scale degree: '" + std::string(text) + "'");
}

std::string_view function_name(HarmonicFunction f) {
  switch (f) {
    case HarmonicFunction::Tonic: return "tonic";
    case HarmonicFunction::Subdominant: return "subdominant";
    case HarmonicFunction::Dominant: return "dominant";
  }
  return "?";
}

HarmonicFunction parse_function(std::string_view text) {
  if (text == "tonic") return HarmonicFunction::Tonic;
  if (text == "subdominant") return HarmonicFunction::Subdominant;
  if (text == "dominant") return HarmonicFunction::Dominant;
  throw Error(ErrorCode::UnknownFunction, "unknown harmonic function: '" + std::string(text) + "'");
}

std::array<PitchClass, 7> scale_notes(const Key& key) {
  std::array<PitchClass, 7> out;
  int pc = key.tonic.value();
  const bool flats = key_prefers_flats(pc);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = PitchClass(pc, flats);
    pc += kMajorSteps[i];
  }
  return out;
}

int ScaleCircle::index_of(PitchClass pc) const {
  for (std::size_t i = 0; i < notes_.size(); ++i)
    if (notes_[i] == pc) return static_cast<int>(i);
  return -1;
}

std::array<PitchClass, 3> chord_tones(Degree deg, const Key& key) {
  const ScaleCircle circle(key);
  const int root = degree_number(deg) - 1;
  return {circle.at(root), circle.at(root + 2), circle.at(root + 4)};
}

FunctionProfile functions_of(Degree deg) {
  using HF = HarmonicFunction;
  switch (deg) {
    case Degree::I: return {{HF::Tonic}, Strength::Normal};
    case Degree::ii: return {{HF::Subdominant}, Strength::Strong};
    case Degree::iii: return {{HF::Tonic, HF::Dominant}, Strength::Normal};
    case Degree::IV: return {{HF::Subdominant}, Strength::Normal};
    case Degree::V: return {{HF::Dominant}, Strength::Normal};
    case Degree::vi: return {{HF::Tonic, HF::Subdominant}, Strength::Normal};
    case Degree::vii: return {{HF::Dominant}, Strength::Strong};
  }
  throw Error(ErrorCode::UnknownDegree, "invalid degree");
}

std::string describe(FunctionSet fs) {
  std::string out = "{";
  bool first = true;
  fs.for_each([&](HarmonicFunction f) {
    if (!first) out += ",";
    out += function_name(f);
    first = false;
  });
  return out + "}";
}

}  // namespace hblocks
