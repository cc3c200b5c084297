#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hblocks/grammar.h"
#include "hblocks/theory.h"

namespace hblocks {

inline constexpr int kTicksPerQuarter = 480;
inline constexpr int kDefaultTempoBpm = 90;
inline constexpr int kDefaultChordBeats = 2;
inline constexpr int kDefaultVelocity = 80;
inline constexpr int kMinTempoBpm = 4;  // 60e6 / 4 still fits the 24-bit tempo field
inline constexpr int kMaxTempoBpm = 960;

// Root position close voicing with the root in octave 4 (60-71).
struct Voicing {
  std::array<int, 3> notes{};
  friend bool operator==(const Voicing&, const Voicing&) = default;
};

Voicing voice_chord(Degree deg, const Key& key);

struct PlaybackEvent {
  enum class Kind { NoteOn, NoteOff };

  std::int64_t tick = 0;
  Kind kind = Kind::NoteOn;
  int note = 0;
  int velocity = 0;
  // Index into the flattened surface the event belongs to.
  int chord_index = 0;

  friend bool operator==(const PlaybackEvent&, const PlaybackEvent&) = default;
};

std::string_view playback_kind_name(PlaybackEvent::Kind k);

struct PlaybackOptions {
  int tempo_bpm = kDefaultTempoBpm;
  int chord_beats = kDefaultChordBeats;
  int velocity = kDefaultVelocity;
};

// Surface chords left to right; at each chord boundary the previous chord's
// note-offs precede the next chord's note-ons.
std::vector<PlaybackEvent> playback_events(const Building& b, const PlaybackOptions& options = {});
std::vector<PlaybackEvent> playback_events(std::span<const Degree> surface, const Key& key,
                                           const PlaybackOptions& options = {});

struct MidiDocument {
  std::vector<std::uint8_t> bytes;
  int tempo_bpm = kDefaultTempoBpm;
};

// Standard MIDI File, format 0, one track, division 480.
MidiDocument render_midi(const Building& b, int tempo_bpm, const Key& key, int chord_beats = kDefaultChordBeats);
MidiDocument render_midi(const Building& b, const PlaybackOptions& options = {});

// Minimal-length big-endian base-128 encoding used for SMF delta times.
void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value);

// Microseconds per quarter note for the tempo meta event.
std::uint32_t tempo_microseconds(int bpm);

// Key-signature accidental count: positive sharps, negative flats.
int key_signature_accidentals(const Key& key);

}  // namespace hblocks
