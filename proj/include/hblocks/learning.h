#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hblocks/audio.h"
#include "hblocks/grammar.h"

namespace hblocks {

inline constexpr int kLevelCount = 7;
inline constexpr std::array<Degree, kLevelCount> kTeachingOrder = {Degree::I,   Degree::IV, Degree::V,  Degree::ii,
                                                                   Degree::iii, Degree::vi, Degree::vii};

struct Level {
  int id = 1;
  Degree teaches = Degree::I;
  std::string intro_text;
  Key key;
  Building demo_building;
  bool includes_basics = false;
  std::uint64_t puzzle_seed = 0;
  std::optional<PlaybackOptions> playback;
};

// Checks count, order, the basics flag, demo validity and that each demo uses
// only chords taught at or before its level. Throws SchemaViolation or
// ChordNotYetTaught.
void validate_levels(const std::vector<Level>& levels);

enum class LessonStep { Intro, ChordBasics, NewChord, DemoBuild, Reconstruct, Complete };

std::string_view lesson_step_name(LessonStep s);
LessonStep parse_lesson_step(std::string_view text);

struct LevelStats {
  int completions = 0;
  // Fewest submissions needed to finish the reconstruction.
  int best_submissions = 0;

  friend bool operator==(const LevelStats&, const LevelStats&) = default;
};

class Progress {
 public:
  const std::set<Degree>& learned_degrees() const { return learned_; }
  const std::set<int>& completed_levels() const { return completed_; }
  const std::map<int, LevelStats>& stats() const { return stats_; }
  bool is_completed(int level_id) const { return completed_.count(level_id) != 0; }

  // Level n is playable when n == 1 or level n-1 is completed.
  bool is_unlocked(int level_id) const;

  // Level ids map to kTeachingOrder.
  void record_completion(int level_id, int submissions);

  static Progress restore(std::set<int> completed, std::map<int, LevelStats> stats);

  friend bool operator==(const Progress&, const Progress&) = default;

 private:
  std::set<Degree> learned_;
  std::set<int> completed_;
  std::map<int, LevelStats> stats_;
};

enum class UnlockState { Locked, Unlocked, Completed };

std::string_view unlock_state_name(UnlockState s);
std::array<UnlockState, kLevelCount> unlock_state(const Progress& progress);

struct HintConfig {
  double idle_seconds = 10.0;
  int failure_threshold = 3;
  double cooldown_seconds = 30.0;
};

struct Hint {
  enum class Trigger { Idle, RepeatedFailure };

  Trigger trigger = Trigger::Idle;
  int slot = 0;
  Degree chord = Degree::I;
  double time = 0.0;
  std::string text;

  friend bool operator==(const Hint&, const Hint&) = default;
};

std::string_view hint_trigger_name(Hint::Trigger t);

struct HintState {
  double last_action_time = 0.0;
  int failed_connect_attempts = 0;
  std::vector<Hint> emitted_hints;

  friend bool operator==(const HintState&, const HintState&) = default;
};

// Position inside one level. DemoBuild works on the demo in canonical block
// order; Reconstruct works on the shuffled puzzle.
struct LessonState {
  int level_id = 1;
  LessonStep step = LessonStep::Intro;
  std::optional<Puzzle> puzzle;
  Arrangement arrangement;
  int submissions = 0;
  HintState hints;

  std::vector<BlockId> detached_blocks() const;
};

struct LessonAction {
  enum class Type { Next, Place, Unplace, Submit };

  Type type = Type::Next;
  double time = 0.0;
  int slot = 0;
  BlockId block;
  std::optional<Arrangement> arrangement;
};

std::string_view lesson_action_name(LessonAction::Type t);

// Throws LockedLevel or NotFound.
LessonState start_level(const Progress& progress, const std::vector<Level>& levels, int level_id, double now);

// Applies one action and returns the new step. Throws IllegalTransition,
// PuzzleIncomplete, IncompatibleConnection, SlotOccupied, UnknownSlot,
// UnknownBlock, SlotReuse. A failed Place counts as a failed connection.
LessonStep advance(LessonState& state, Progress& progress, const Level& level, const LessonAction& action);

// At most one hint per trigger per cooldown window; deterministic in the
// recorded action times and `now`.
std::optional<Hint> hint_check(LessonState& state, double now, const HintConfig& config = {});

const Level& find_level(const std::vector<Level>& levels, int level_id);

}  // namespace hblocks
