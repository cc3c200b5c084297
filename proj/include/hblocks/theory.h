#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace hblocks {

// Pitch class 0-11 (0 = C). Equality is by value; the spelling only affects
// display and follows the fixed per-key table (sharps for C G D A E B F#,
// flats for F Bb Eb Ab Db).
class PitchClass {
 public:
  constexpr PitchClass() = default;
  constexpr explicit PitchClass(int value, bool prefer_flats = false)
      : value_(static_cast<std::uint8_t>(((value % 12) + 12) % 12)), flats_(prefer_flats) {}

  constexpr int value() const { return value_; }
  constexpr bool prefers_flats() const { return flats_; }
  std::string_view spelled_name() const;

  friend constexpr bool operator==(PitchClass a, PitchClass b) { return a.value_ == b.value_; }

 private:
  std::uint8_t value_ = 0;
  bool flats_ = false;
};

enum class Mode { Major };

struct Key {
  PitchClass tonic{};
  Mode mode = Mode::Major;

  std::string_view name() const { return tonic.spelled_name(); }
  friend bool operator==(const Key& a, const Key& b) { return a.tonic == b.tonic && a.mode == b.mode; }
};

Key c_major();
// Accepts "C", "G", ..., "F#", "F", "Bb", ..., "Db", optionally followed by " major".
Key parse_key(std::string_view text);
// Major key for a pitch class, using that key's preferred spelling.
Key major_key(int tonic_pc);

enum class Degree : std::uint8_t { I = 1, ii, iii, IV, V, vi, vii };

inline constexpr std::array<Degree, 7> kAllDegrees = {Degree::I,  Degree::ii, Degree::iii, Degree::IV,
                                                      Degree::V,  Degree::vi, Degree::vii};

constexpr int degree_number(Degree d) { return static_cast<int>(d); }
Degree degree_from_number(int n);
std::string_view roman_label(Degree d);
// Exactly the seven canonical labels, case-sensitive. Throws UnknownDegree.
Degree parse_degree(std::string_view text);

enum class HarmonicFunction : std::uint8_t { Tonic, Subdominant, Dominant };

std::string_view function_name(HarmonicFunction f);
HarmonicFunction parse_function(std::string_view text);

// Small value set over the three harmonic functions.
class FunctionSet {
 public:
  constexpr FunctionSet() = default;
  constexpr FunctionSet(std::initializer_list<HarmonicFunction> fs) {
    for (auto f : fs) bits_ |= bit(f);
  }

  constexpr bool contains(HarmonicFunction f) const { return (bits_ & bit(f)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return ((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
  constexpr void insert(HarmonicFunction f) { bits_ |= bit(f); }
  constexpr bool subset_of(FunctionSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(FunctionSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr FunctionSet operator|(FunctionSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr FunctionSet operator&(FunctionSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr std::uint8_t bits() const { return bits_; }
  static constexpr FunctionSet from_bits(std::uint8_t b) {
    FunctionSet s;
    s.bits_ = static_cast<std::uint8_t>(b & 0x7);
    return s;
  }

  friend constexpr bool operator==(FunctionSet a, FunctionSet b) { return a.bits_ == b.bits_; }

  // Members in canonical order Tonic, Subdominant, Dominant.
  template <typename F>
  void for_each(F&& fn) const {
    for (auto f : {HarmonicFunction::Tonic, HarmonicFunction::Subdominant, HarmonicFunction::Dominant})
      if (contains(f)) fn(f);
  }

 private:
  static constexpr std::uint8_t bit(HarmonicFunction f) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
  }
  std::uint8_t bits_ = 0;
};

enum class Strength { Normal, Strong };

struct FunctionProfile {
  FunctionSet functions;
  Strength strength = Strength::Normal;

  friend bool operator==(const FunctionProfile&, const FunctionProfile&) = default;
};

std::array<PitchClass, 7> scale_notes(const Key& key);

// The key's seven notes clockwise from the tonic; indices wrap mod 7.
class ScaleCircle {
 public:
  explicit ScaleCircle(const Key& key) : notes_(scale_notes(key)) {}

  const std::array<PitchClass, 7>& notes() const { return notes_; }
  PitchClass at(int index) const { return notes_[static_cast<std::size_t>(wrap(index))]; }
  PitchClass successor(PitchClass pc) const { return at(index_of(pc) + 1); }
  PitchClass predecessor(PitchClass pc) const { return at(index_of(pc) - 1); }
  // -1 when pc is not in the key.
  int index_of(PitchClass pc) const;

  static constexpr int wrap(int i) { return ((i % 7) + 7) % 7; }

 private:
  std::array<PitchClass, 7> notes_;
};

inline ScaleCircle scale_circle(const Key& key) { return ScaleCircle(key); }

std::array<PitchClass, 3> chord_tones(Degree deg, const Key& key);
FunctionProfile functions_of(Degree deg);

std::string describe(FunctionSet fs);

}  // namespace hblocks
