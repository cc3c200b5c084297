#include "hblocks/learning.h"

#include <algorithm>
#include <string>

#include "hblocks/errors.h"

namespace hblocks {

namespace {

std::string level_text(int id) { return "level " + std::to_string(id); }

Puzzle demo_puzzle(const Building& b) {
  // Same skeleton as a shuffled puzzle but blocks left in canonical order.
  Puzzle p = shuffle_puzzle(b, 0);
  p.blocks.clear();
  for (const MusicalBlock* blk : b.blocks()) p.blocks.push_back(*blk);
  return p;
}

void touch(LessonState& state, double time) {
  state.hints.last_action_time = std::max(state.hints.last_action_time, time);
}

}  // namespace

void validate_levels(const std::vector<Level>& levels) {
  if (levels.size() != kLevelCount)
    throw Error(ErrorCode::SchemaViolation, "expected 7 levels, found " + std::to_string(levels.size()));
  std::set<Degree> available;
  for (int i = 0; i < kLevelCount; ++i) {
    const Level& level = levels[static_cast<std::size_t>(i)];
    const int id = i + 1;
    if (level.id != id)
      throw Error(ErrorCode::SchemaViolation, "levels out of order: position " + std::to_string(id) + " holds " +
                                                  level_text(level.id),
                  id);
    if (level.teaches != kTeachingOrder[static_cast<std::size_t>(i)])
      throw Error(ErrorCode::SchemaViolation, level_text(id) + " must teach " +
                                                  std::string(roman_label(kTeachingOrder[static_cast<std::size_t>(i)])),
                  id);
    if (level.includes_basics != (id == 1))
      throw Error(ErrorCode::SchemaViolation, "chord basics appear in level 1 only", id);
    if (!(level.demo_building.key == level.key))
      throw Error(ErrorCode::SchemaViolation, level_text(id) + " demo key differs from the level key", id);
    available.insert(level.teaches);
    for (const MusicalBlock* blk : level.demo_building.blocks())
      if (!available.count(blk->degree))
        throw Error(ErrorCode::ChordNotYetTaught,
                    level_text(id) + " demo uses " + std::string(roman_label(blk->degree)) + " before it is taught",
                    id);
    const ValidationReport report = validate_building(level.demo_building);
    if (!report.ok())
      throw Error(ErrorCode::SchemaViolation, level_text(id) + " demo is invalid: " + report.violations[0].message, id);
  }
}

std::string_view lesson_step_name(LessonStep s) {
  switch (s) {
    case LessonStep::Intro: return "intro";
    case LessonStep::ChordBasics: return "chord_basics";
    case LessonStep::NewChord: return "new_chord";
    case LessonStep::DemoBuild: return "demo_build";
    case LessonStep::Reconstruct: return "reconstruct";
    case LessonStep::Complete: return "complete";
  }
  return "?";
}

LessonStep parse_lesson_step(std::string_view text) {
  for (auto s : {LessonStep::Intro, LessonStep::ChordBasics, LessonStep::NewChord, LessonStep::DemoBuild,
                 LessonStep::Reconstruct, LessonStep::Complete})
    if (lesson_step_name(s) == text) return s;
  throw Error(ErrorCode::SchemaViolation, "unknown lesson step: '" + std::string(text) + "'");
}

bool Progress::is_unlocked(int level_id) const {
  if (level_id < 1 || level_id > kLevelCount) return false;
  return level_id == 1 || is_completed(level_id - 1);
}

void Progress::record_completion(int level_id, int submissions) {
  if (level_id < 1 || level_id > kLevelCount)
    throw Error(ErrorCode::NotFound, "no " + level_text(level_id), level_id);
  completed_.insert(level_id);
  learned_.insert(kTeachingOrder[static_cast<std::size_t>(level_id - 1)]);
  LevelStats& s = stats_[level_id];
  s.best_submissions = s.completions == 0 ? submissions : std::min(s.best_submissions, submissions);
  ++s.completions;
}

Progress Progress::restore(std::set<int> completed, std::map<int, LevelStats> stats) {
  Progress p;
  for (int id : completed) {
    if (id < 1 || id > kLevelCount) throw Error(ErrorCode::SchemaViolation, "no " + level_text(id), id);
    p.learned_.insert(kTeachingOrder[static_cast<std::size_t>(id - 1)]);
  }
  p.completed_ = std::move(completed);
  p.stats_ = std::move(stats);
  return p;
}

std::string_view unlock_state_name(UnlockState s) {
  switch (s) {
    case UnlockState::Locked: return "locked";
    case UnlockState::Unlocked: return "unlocked";
    case UnlockState::Completed: return "completed";
  }
  return "?";
}

std::array<UnlockState, kLevelCount> unlock_state(const Progress& progress) {
  std::array<UnlockState, kLevelCount> out{};
  for (int id = 1; id <= kLevelCount; ++id) {
    auto& s = out[static_cast<std::size_t>(id - 1)];
    if (progress.is_completed(id))
      s = UnlockState::Completed;
    else
      s = progress.is_unlocked(id) ? UnlockState::Unlocked : UnlockState::Locked;
  }
  return out;
}

std::string_view hint_trigger_name(Hint::Trigger t) {
  return t == Hint::Trigger::Idle ? "idle" : "repeated_failure";
}

std::string_view lesson_action_name(LessonAction::Type t) {
  switch (t) {
    case LessonAction::Type::Next: return "next";
    case LessonAction::Type::Place: return "place";
    case LessonAction::Type::Unplace: return "unplace";
    case LessonAction::Type::Submit: return "submit";
  }
  return "?";
}

std::vector<BlockId> LessonState::detached_blocks() const {
  std::vector<BlockId> out;
  if (!puzzle) return out;
  for (const auto& b : puzzle->blocks) {
    const bool placed = std::any_of(arrangement.begin(), arrangement.end(),
                                    [&](const auto& kv) { return kv.second == b.id; });
    if (!placed) out.push_back(b.id);
  }
  return out;
}

const Level& find_level(const std::vector<Level>& levels, int level_id) {
  for (const auto& l : levels)
    if (l.id == level_id) return l;
  throw Error(ErrorCode::NotFound, "no " + level_text(level_id), level_id);
}

LessonState start_level(const Progress& progress, const std::vector<Level>& levels, int level_id, double now) {
  find_level(levels, level_id);
  if (!progress.is_unlocked(level_id)) throw Error(ErrorCode::LockedLevel, level_text(level_id) + " is locked", level_id);
  LessonState state;
  state.level_id = level_id;
  state.step = LessonStep::Intro;
  state.hints.last_action_time = now;
  return state;
}

LessonStep advance(LessonState& state, Progress& progress, const Level& level, const LessonAction& action) {
  auto illegal = [&]() {
    return Error(ErrorCode::IllegalTransition, std::string(lesson_action_name(action.type)) + " is not allowed during " +
                                                   std::string(lesson_step_name(state.step)));
  };
  const bool building_step = state.step == LessonStep::DemoBuild || state.step == LessonStep::Reconstruct;

  switch (action.type) {
    case LessonAction::Type::Next:
      switch (state.step) {
        case LessonStep::Intro:
          state.step = level.includes_basics ? LessonStep::ChordBasics : LessonStep::NewChord;
          break;
        case LessonStep::ChordBasics: state.step = LessonStep::NewChord; break;
        case LessonStep::NewChord:
          state.step = LessonStep::DemoBuild;
          state.puzzle = demo_puzzle(level.demo_building);
          state.arrangement.clear();
          break;
        case LessonStep::DemoBuild:
          state.step = LessonStep::Reconstruct;
          state.puzzle = shuffle_puzzle(level.demo_building, level.puzzle_seed);
          state.arrangement.clear();
          state.submissions = 0;
          state.hints.failed_connect_attempts = 0;
          break;
        case LessonStep::Reconstruct:
        case LessonStep::Complete: throw illegal();
      }
      break;

    case LessonAction::Type::Place: {
      if (!building_step) throw illegal();
      const Puzzle& puzzle = *state.puzzle;
      const int slots = static_cast<int>(puzzle.skeleton.size());
      if (action.slot < 0 || action.slot >= slots)
        throw Error(ErrorCode::UnknownSlot, "no slot " + std::to_string(action.slot), action.slot);
      if (!puzzle.find_block(action.block))
        throw Error(ErrorCode::UnknownBlock, "block " + std::to_string(action.block.value) + " is not in the puzzle");
      if (state.arrangement.count(action.slot))
        throw Error(ErrorCode::SlotOccupied, "slot " + std::to_string(action.slot) + " is occupied", action.slot);
      for (const auto& [slot, id] : state.arrangement)
        if (id == action.block)
          throw Error(ErrorCode::SlotReuse, "block " + std::to_string(id.value) + " is already placed", slot);
      Arrangement trial = state.arrangement;
      trial.emplace(action.slot, action.block);
      const ReconstructionResult r = check_reconstruction(puzzle, trial);
      for (const auto& v : r.violations) {
        if (std::find(v.blocks.begin(), v.blocks.end(), action.block) != v.blocks.end()) {
          ++state.hints.failed_connect_attempts;
          touch(state, action.time);
          throw Error(ErrorCode::IncompatibleConnection, v.message, action.slot);
        }
      }
      state.arrangement = std::move(trial);
      state.hints.failed_connect_attempts = 0;
      break;
    }

    case LessonAction::Type::Unplace:
      if (!building_step) throw illegal();
      if (!state.arrangement.erase(action.slot))
        throw Error(ErrorCode::UnknownSlot, "slot " + std::to_string(action.slot) + " is empty", action.slot);
      break;

    case LessonAction::Type::Submit: {
      if (state.step != LessonStep::Reconstruct) throw illegal();
      const Arrangement& candidate = action.arrangement ? *action.arrangement : state.arrangement;
      const ReconstructionResult r = check_reconstruction(*state.puzzle, candidate);
      ++state.submissions;
      touch(state, action.time);
      if (r.status != ReconstructionResult::Status::Complete)
        throw Error(ErrorCode::PuzzleIncomplete,
                    std::to_string(r.correct_slots.size()) + " of " + std::to_string(state.puzzle->skeleton.size()) +
                        " slots correct");
      state.arrangement = candidate;
      state.step = LessonStep::Complete;
      progress.record_completion(state.level_id, state.submissions);
      break;
    }
  }
  touch(state, action.time);
  return state.step;
}

std::optional<Hint> hint_check(LessonState& state, double now, const HintConfig& config) {
  if (state.step != LessonStep::DemoBuild && state.step != LessonStep::Reconstruct) return std::nullopt;
  if (!state.puzzle) return std::nullopt;

  auto cooled_down = [&](Hint::Trigger trigger) {
    for (auto it = state.hints.emitted_hints.rbegin(); it != state.hints.emitted_hints.rend(); ++it)
      if (it->trigger == trigger) return now - it->time >= config.cooldown_seconds;
    return true;
  };

  std::optional<Hint::Trigger> trigger;
  if (state.hints.failed_connect_attempts >= config.failure_threshold && cooled_down(Hint::Trigger::RepeatedFailure))
    trigger = Hint::Trigger::RepeatedFailure;
  else if (now - state.hints.last_action_time > config.idle_seconds && !state.detached_blocks().empty() &&
           cooled_down(Hint::Trigger::Idle))
    trigger = Hint::Trigger::Idle;
  if (!trigger) return std::nullopt;

  // Name only the first slot still missing its chord.
  const Puzzle& puzzle = *state.puzzle;
  int slot = -1;
  for (const auto& s : puzzle.skeleton) {
    auto it = state.arrangement.find(s.index);
    const MusicalBlock* blk = it == state.arrangement.end() ? nullptr : puzzle.find_block(it->second);
    if (!blk || blk->degree != puzzle.target_degree(s.index)) {
      slot = s.index;
      break;
    }
  }
  if (slot < 0) return std::nullopt;

  Hint hint;
  hint.trigger = *trigger;
  hint.slot = slot;
  hint.chord = puzzle.target_degree(slot);
  hint.time = now;
  hint.text = "Try the " + std::string(roman_label(hint.chord)) + " block in slot " + std::to_string(slot) + ".";
  state.hints.emitted_hints.push_back(hint);
  return hint;
}

}  // namespace hblocks
