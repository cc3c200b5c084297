#include "hblocks/audio.h"

#include <algorithm>
#include <string>

#include "hblocks/errors.h"

namespace hblocks {

namespace {

constexpr int kOctave4C = 60;

void check_options(int tempo_bpm, int chord_beats, int velocity) {
  if (tempo_bpm < kMinTempoBpm || tempo_bpm > kMaxTempoBpm)
    throw Error(ErrorCode::InvalidArgument, "tempo out of range: " + std::to_string(tempo_bpm));
  if (chord_beats < 1) throw Error(ErrorCode::InvalidArgument, "chord_beats must be at least 1");
  if (velocity < 1 || velocity > 127) throw Error(ErrorCode::InvalidArgument, "velocity must be 1-127");
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

}  // namespace

Voicing voice_chord(Degree deg, const Key& key) {
  const auto tones = chord_tones(deg, key);
  Voicing v;
  v.notes[0] = kOctave4C + tones[0].value();
  for (std::size_t i = 1; i < 3; ++i) {
    int note = v.notes[i - 1] + 1;
    while (note % 12 != tones[i].value()) ++note;
    v.notes[i] = note;
  }
  return v;
}

std::string_view playback_kind_name(PlaybackEvent::Kind k) {
  return k == PlaybackEvent::Kind::NoteOn ? "note_on" : "note_off";
}

std::vector<PlaybackEvent> playback_events(std::span<const Degree> surface, const Key& key,
                                           const PlaybackOptions& options) {
  check_options(options.tempo_bpm, options.chord_beats, options.velocity);
  const std::int64_t slot_ticks = static_cast<std::int64_t>(options.chord_beats) * kTicksPerQuarter;
  std::vector<PlaybackEvent> events;
  events.reserve(surface.size() * 6);
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const Voicing v = voice_chord(surface[i], key);
    const std::int64_t start = static_cast<std::int64_t>(i) * slot_ticks;
    const int idx = static_cast<int>(i);
    for (int note : v.notes) events.push_back({start, PlaybackEvent::Kind::NoteOn, note, options.velocity, idx});
    for (int note : v.notes) events.push_back({start + slot_ticks, PlaybackEvent::Kind::NoteOff, note, 0, idx});
  }
  // Each chord's offs were appended before the next chord's ons, but after
  // them in the vector; move offs ahead of same-tick ons.
  std::stable_sort(events.begin(), events.end(), [](const PlaybackEvent& a, const PlaybackEvent& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    return a.kind == PlaybackEvent::Kind::NoteOff && b.kind == PlaybackEvent::Kind::NoteOn;
  });
  return events;
}

std::vector<PlaybackEvent> playback_events(const Building& b, const PlaybackOptions& options) {
  const auto surface = flatten(b);
  return playback_events(surface, b.key, options);
}

void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value) {
  if (value > 0x0FFFFFFF) throw Error(ErrorCode::InvalidArgument, "delta time exceeds 28 bits");
  std::uint8_t buf[4];
  int n = 0;
  buf[n++] = static_cast<std::uint8_t>(value & 0x7F);
  while ((value >>= 7) != 0) buf[n++] = static_cast<std::uint8_t>(0x80 | (value & 0x7F));
  while (n > 0) out.push_back(buf[--n]);
}

std::uint32_t tempo_microseconds(int bpm) {
  return static_cast<std::uint32_t>((60'000'000LL + bpm / 2) / bpm);
}

int key_signature_accidentals(const Key& key) {
  // Position on the circle of fifths from C, folded so flat keys are negative.
  const int fifths = (key.tonic.value() * 7) % 12;
  return key.tonic.prefers_flats() ? fifths - 12 : fifths;
}

namespace {

MidiDocument render_surface(std::span<const Degree> surface, const Key& key, const PlaybackOptions& options) {
  const int tempo_bpm = options.tempo_bpm;
  const auto events = playback_events(surface, key, options);

  std::vector<std::uint8_t> track;
  const std::uint32_t tempo = tempo_microseconds(tempo_bpm);
  append_vlq(track, 0);
  track.insert(track.end(), {0xFF, 0x51, 0x03, static_cast<std::uint8_t>(tempo >> 16),
                             static_cast<std::uint8_t>(tempo >> 8), static_cast<std::uint8_t>(tempo)});
  append_vlq(track, 0);
  track.insert(track.end(),
               {0xFF, 0x59, 0x02, static_cast<std::uint8_t>(static_cast<std::int8_t>(key_signature_accidentals(key))),
                0x00});

  std::int64_t now = 0;
  for (const auto& e : events) {
    append_vlq(track, static_cast<std::uint32_t>(e.tick - now));
    now = e.tick;
    const bool on = e.kind == PlaybackEvent::Kind::NoteOn;
    track.push_back(on ? 0x90 : 0x80);
    track.push_back(static_cast<std::uint8_t>(e.note));
    track.push_back(static_cast<std::uint8_t>(on ? e.velocity : 0));
  }
  append_vlq(track, 0);
  track.insert(track.end(), {0xFF, 0x2F, 0x00});

  MidiDocument doc;
  doc.tempo_bpm = tempo_bpm;
  auto& out = doc.bytes;
  out.insert(out.end(), {'M', 'T', 'h', 'd'});
  put_u32(out, 6);
  put_u16(out, 0);
  put_u16(out, 1);
  put_u16(out, kTicksPerQuarter);
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_u32(out, static_cast<std::uint32_t>(track.size()));
  out.insert(out.end(), track.begin(), track.end());
  return doc;
}

}  // namespace

MidiDocument render_midi(const Building& b, int tempo_bpm, const Key& key, int chord_beats) {
  const auto surface = flatten(b);
  return render_surface(surface, key, PlaybackOptions{tempo_bpm, chord_beats, kDefaultVelocity});
}

MidiDocument render_midi(const Building& b, const PlaybackOptions& options) {
  const auto surface = flatten(b);
  return render_surface(surface, b.key, options);
}

}  // namespace hblocks
