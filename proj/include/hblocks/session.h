#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hblocks/creation.h"
#include "hblocks/layout.h"
#include "hblocks/learning.h"

namespace hblocks {

enum class SessionMode { Menu, Learning, Creation };

std::string_view session_mode_name(SessionMode m);
SessionMode parse_session_mode(std::string_view text);

struct SessionEvent {
  std::uint64_t seq = 0;
  double time = 0.0;
  std::string type;
  nlohmann::json data;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

// Everything a learner's run carries: menu/lesson/creation position,
// progress, the creation workspace, saved compositions and the event log.
struct Session {
  std::string id;
  SessionMode mode = SessionMode::Menu;
  double clock = 0.0;
  Progress progress;
  std::optional<LessonState> lesson;
  Workspace workspace;
  std::vector<Composition> compositions;
  std::vector<SessionEvent> events;
  std::uint64_t next_event_seq = 1;

  const SessionEvent& log(std::string type, nlohmann::json data);
};

}  // namespace hblocks
