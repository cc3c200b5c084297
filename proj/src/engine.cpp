#include "hblocks/engine.h"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "hblocks/audio.h"
#include "hblocks/creation.h"
#include "hblocks/errors.h"

namespace hblocks {

// --- Session ---------------------------------------------------------------

std::string_view session_mode_name(SessionMode m) {
  switch (m) {
    case SessionMode::Menu: return "menu";
    case SessionMode::Learning: return "learning";
    case SessionMode::Creation: return "creation";
  }
  return "?";
}

SessionMode parse_session_mode(std::string_view text) {
  if (text == "menu") return SessionMode::Menu;
  if (text == "learning") return SessionMode::Learning;
  if (text == "creation") return SessionMode::Creation;
  throw Error(ErrorCode::SchemaViolation, "unknown session mode: '" + std::string(text) + "'");
}

const SessionEvent& Session::log(std::string type, nlohmann::json data) {
  events.push_back(SessionEvent{next_event_seq++, clock, std::move(type), std::move(data)});
  return events.back();
}

Json event_to_json(const SessionEvent& e) {
  return Json{{"seq", e.seq}, {"time", e.time}, {"type", e.type}, {"data", e.data}};
}

// --- Error mapping ---------------------------------------------------------

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidArgument:
    case ErrorCode::SchemaViolation:
    case ErrorCode::UnknownDegree:
    case ErrorCode::UnknownKey:
    case ErrorCode::UnknownFunction:
    case ErrorCode::SequenceTooShort: return 400;
    case ErrorCode::IoError:
    case ErrorCode::CorruptState:
    case ErrorCode::ContentMissing: return 500;
    default: return 422;
  }
}

Json error_body(const Error& e, const Json& details) {
  Json err{{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
  if (e.index()) err["index"] = *e.index();
  if (!details.is_null()) err["details"] = details;
  return Json{{"ok", false}, {"error", err}};
}

namespace {

Json ok(Json body = Json::object()) {
  body["ok"] = true;
  return body;
}

Json names(const std::array<PitchClass, 7>& pcs) {
  Json out = Json::array();
  for (auto pc : pcs) out.push_back(std::string(pc.spelled_name()));
  return out;
}

Json block_view(const MusicalBlock& b) {
  Json j = block_to_json(b);
  j["symbol"] = symbol_to_json(b.symbol);
  return j;
}

Json surface_json(const std::vector<Degree>& surface) {
  Json out = Json::array();
  for (Degree d : surface) out.push_back(std::string(roman_label(d)));
  return out;
}

// Field helpers for action records.
int int_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_number_integer())
    throw Error(ErrorCode::SchemaViolation, std::string("action field '") + name + "' must be an integer");
  return j.at(name).get<int>();
}

double number_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_number())
    throw Error(ErrorCode::SchemaViolation, std::string("action field '") + name + "' must be a number");
  return j.at(name).get<double>();
}

std::string string_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_string())
    throw Error(ErrorCode::SchemaViolation, std::string("action field '") + name + "' must be a string");
  return j.at(name).get<std::string>();
}

BlockId block_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_number_unsigned())
    throw Error(ErrorCode::SchemaViolation, std::string("action field '") + name + "' must be a block id");
  return BlockId{j.at(name).get<std::uint64_t>()};
}

Arrangement arrangement_field(const Json& j) {
  const Json& a = j.at("arrangement");
  if (!a.is_array()) throw Error(ErrorCode::SchemaViolation, "arrangement must be an array");
  Arrangement out;
  for (const auto& e : a) {
    check_fields(e, "arrangement entry", {"slot", "block"});
    const int slot = int_field(e, "slot");
    if (!out.emplace(slot, block_field(e, "block")).second)
      throw Error(ErrorCode::SlotReuse, "slot " + std::to_string(slot) + " listed twice", slot);
  }
  return out;
}

std::vector<Degree> sequence_field(const Json& j) {
  std::vector<Degree> out;
  const Json& seq = j.at("sequence");
  if (seq.is_string()) {
    std::istringstream in(seq.get<std::string>());
    std::string tok;
    while (in >> tok) out.push_back(parse_degree(tok));
  } else if (seq.is_array()) {
    for (const auto& v : seq) {
      if (!v.is_string()) throw Error(ErrorCode::SchemaViolation, "sequence entries must be degree labels");
      out.push_back(parse_degree(v.get<std::string>()));
    }
  } else {
    throw Error(ErrorCode::SchemaViolation, "sequence must be a list or a space-separated string");
  }
  return out;
}

std::pair<std::string_view, std::string_view> split_target(std::string_view target) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return {target, {}};
  return {target.substr(0, q), target.substr(q + 1)};
}

std::optional<std::string> query_param(std::string_view query, std::string_view name) {
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view part = query.substr(0, amp);
    const auto eq = part.find('=');
    if (part.substr(0, eq) == name) return std::string(eq == std::string_view::npos ? "" : part.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return std::nullopt;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto slash = path.find('/');
    parts.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash);
  }
  return parts;
}

void require_mode(const Session& s, SessionMode mode, std::string_view action) {
  if (s.mode != mode)
    throw Error(ErrorCode::IllegalTransition, std::string(action) + " requires " +
                                                  std::string(session_mode_name(mode)) + " mode; session is in " +
                                                  std::string(session_mode_name(s.mode)) + " mode");
}

}  // namespace

Json matrix_to_json(const Key& key) {
  const CompatibilityMatrix m = compatibility_matrix(key);
  Json rows = Json::array();
  int allowed = 0;
  for (Degree a : kAllDegrees) {
    Json row = Json::array();
    for (Degree b : kAllDegrees) {
      const bool v = m[degree_number(a) - 1][degree_number(b) - 1];
      allowed += v;
      row.push_back(v);
    }
    rows.push_back(row);
  }
  Json labels = Json::array();
  for (Degree d : kAllDegrees) labels.push_back(std::string(roman_label(d)));
  return Json{{"labels", labels}, {"matrix", rows}, {"allowed", allowed}, {"forbidden", 49 - allowed}};
}

// --- Engine ----------------------------------------------------------------

Engine::Engine(std::vector<Level> levels, EngineOptions options)
    : levels_(std::move(levels)), options_(std::move(options)) {
  validate_levels(levels_);
  if (options_.store_dir) store_.emplace(*options_.store_dir);
}

Engine::~Engine() { shutdown(); }

void Engine::shutdown() {
  shutdown_ = true;
  std::lock_guard lock(sessions_mu_);
  for (auto& [id, slot] : sessions_) {
    std::lock_guard slot_lock(slot->mu);
    slot->cv.notify_all();
  }
}

Json Engine::level_view(const Level& level) const {
  const FunctionProfile profile = functions_of(level.teaches);
  Json functions = function_set_to_json(profile.functions);
  Json tones = Json::array();
  for (auto pc : chord_tones(level.teaches, level.key)) tones.push_back(std::string(pc.spelled_name()));
  return Json{{"level_id", level.id},
              {"teaches", std::string(roman_label(level.teaches))},
              {"key", std::string(level.key.name())},
              {"intro_text", level.intro_text},
              {"includes_basics", level.includes_basics},
              {"scale_circle", names(scale_circle(level.key).notes())},
              {"chord_tones", tones},
              {"functions", functions},
              {"strength", profile.strength == Strength::Strong ? "strong" : "normal"},
              {"symbol", symbol_to_json(symbol_for(level.teaches))},
              {"demo_surface", surface_json(flatten(level.demo_building))},
              {"block_count", level.demo_building.block_count()}};
}

Json Engine::list_levels() const {
  Json out = Json::array();
  for (const auto& l : levels_) out.push_back(level_view(l));
  return ok(Json{{"levels", out}});
}

Json Engine::matrix(const Key& key) const { return ok(matrix_to_json(key)); }

Json Engine::analyze(const Json& request) const {
  check_fields(request, "analyze request", {"sequence"}, {"key"});
  const Key key = request.contains("key") ? parse_key(string_field(request, "key")) : c_major();
  const auto seq = sequence_field(request);
  Json body = parse_tree_to_json(parse_building(seq, key));
  if (seq.size() >= 2) {
    const auto kind = classify_segment(seq, key);
    body["segment_kind"] = kind ? Json(std::string(structure_name(*kind))) : Json(nullptr);
  }
  return ok(std::move(body));
}

Json Engine::validate(const Json& building_doc) const {
  const Building b = building_from_json(building_doc);
  // "ok" is the envelope flag here; the verdict goes in "valid".
  Json report = report_to_json(validate_building(b));
  report["valid"] = report.at("ok");
  return ok(std::move(report));
}

std::vector<std::uint8_t> Engine::render(const Json& request) const {
  check_fields(request, "render request", {"building"}, {"tempo_bpm", "chord_beats"});
  const Building b = building_from_json(request.at("building"));
  ValidationReport report = validate_building(b);
  if (!report.ok()) throw ValidationFailedError(std::move(report));
  PlaybackOptions opts;
  if (request.contains("tempo_bpm")) opts.tempo_bpm = int_field(request, "tempo_bpm");
  if (request.contains("chord_beats")) opts.chord_beats = int_field(request, "chord_beats");
  return render_midi(b, opts).bytes;
}

std::shared_ptr<Engine::Slot> Engine::find_slot(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (store_ && store_->exists(id)) {
    auto slot = std::make_shared<Slot>();
    slot->session = store_->load(id);
    sessions_.emplace(id, slot);
    return slot;
  }
  throw Error(ErrorCode::NotFound, "no session '" + id + "'");
}

void Engine::persist(const Session& s) const {
  if (store_) store_->save(s);
}

Json Engine::create_session(std::optional<std::string> id) {
  std::shared_ptr<Slot> slot = std::make_shared<Slot>();
  {
    std::lock_guard lock(sessions_mu_);
    if (id) {
      if (!valid_session_id(*id)) throw Error(ErrorCode::InvalidArgument, "invalid session id '" + *id + "'");
      if (sessions_.count(*id) || (store_ && store_->exists(*id)))
        throw Error(ErrorCode::InvalidArgument, "session '" + *id + "' already exists");
    } else {
      do {
        id = "session-" + std::to_string(next_session_++);
      } while (sessions_.count(*id) || (store_ && store_->exists(*id)));
    }
    slot->session.id = *id;
    slot->session.log("created", Json{{"session_id", *id}});
    sessions_.emplace(*id, slot);
  }
  std::lock_guard lock(slot->mu);
  persist(slot->session);
  return ok(session_view(slot->session));
}

Json Engine::session_view(const Session& s) const {
  Json unlock = Json::array();
  for (auto u : unlock_state(s.progress)) unlock.push_back(std::string(unlock_state_name(u)));
  Json pal = Json::array();
  if (creation_unlocked(s.progress))
    for (const auto& e : palette(s.progress))
      pal.push_back(Json{{"degree", std::string(roman_label(e.degree))},
                         {"symbol", symbol_to_json(e.symbol)},
                         {"tenon", function_set_to_json(e.default_tenon.allowed_successor_functions)},
                         {"mortise", function_set_to_json(e.default_mortise.accepted_own_functions)}});
  Json lesson = nullptr;
  if (s.lesson) {
    Json arrangement = Json::array();
    for (const auto& [slot, id] : s.lesson->arrangement) arrangement.push_back(Json{{"slot", slot}, {"block", id.value}});
    lesson = Json{{"level_id", s.lesson->level_id},
                  {"step", std::string(lesson_step_name(s.lesson->step))},
                  {"puzzle", s.lesson->puzzle ? puzzle_view_json(*s.lesson->puzzle) : Json(nullptr)},
                  {"arrangement", arrangement},
                  {"submissions", s.lesson->submissions},
                  {"failed_connect_attempts", s.lesson->hints.failed_connect_attempts}};
  }
  Json compositions = Json::array();
  for (const auto& c : s.compositions) compositions.push_back(composition_to_json(c));
  Json progress = progress_to_json(s.progress);
  progress["unlock"] = unlock;
  return Json{{"session_id", s.id},
              {"mode", std::string(session_mode_name(s.mode))},
              {"clock", s.clock},
              {"progress", progress},
              {"creation_unlocked", creation_unlocked(s.progress)},
              {"palette", pal},
              {"lesson", lesson},
              {"workspace", workspace_to_json(s.workspace)},
              {"compositions", compositions},
              {"last_event_seq", s.next_event_seq - 1}};
}

Json Engine::get_session(const std::string& id) {
  auto slot = find_slot(id);
  std::lock_guard lock(slot->mu);
  return ok(session_view(slot->session));
}

Json Engine::post_action(const std::string& id, const Json& action) {
  auto slot = find_slot(id);
  std::lock_guard lock(slot->mu);
  Session& s = slot->session;
  const std::string type = action.is_object() && action.contains("type") && action.at("type").is_string()
                               ? action.at("type").get<std::string>()
                               : std::string();
  try {
    if (type.empty()) throw Error(ErrorCode::SchemaViolation, "action needs a string 'type'");
    double time = s.clock;
    if (action.contains("time")) time = number_field(action, "time");
    s.clock = std::max(s.clock, time);
    Json result = apply(s, action, time);
    persist(s);
    slot->cv.notify_all();
    return ok(std::move(result));
  } catch (const Error& e) {
    Json details = nullptr;
    if (auto* vf = dynamic_cast<const ValidationFailedError*>(&e)) details = report_to_json(vf->report());
    if (auto* db = dynamic_cast<const DetachedBlocksError*>(&e)) {
      details = Json::array();
      for (BlockId b : db->blocks()) details.push_back(b.value);
    }
    if (e.code() == ErrorCode::PuzzleIncomplete && s.lesson && s.lesson->puzzle) {
      const Arrangement& a = action.contains("arrangement") ? arrangement_field(action) : s.lesson->arrangement;
      details = reconstruction_to_json(check_reconstruction(*s.lesson->puzzle, a));
    }
    s.log("rejected", Json{{"action", type}, {"error", error_body(e, details).at("error")}});
    persist(s);
    slot->cv.notify_all();
    throw ActionError(e, std::move(details));
  }
}

Json Engine::apply(Session& s, const Json& action, double time) {
  const std::string type = action.at("type").get<std::string>();

  auto lesson_action = [&](LessonAction la) -> Json {
    require_mode(s, SessionMode::Learning, type);
    LessonState& lesson = *s.lesson;
    const Level& level = find_level(levels_, lesson.level_id);
    const LessonStep before = lesson.step;
    la.time = time;
    const LessonStep after = advance(lesson, s.progress, level, la);
    Json result{{"step", std::string(lesson_step_name(after))}};
    if (after != before) {
      if (after == LessonStep::DemoBuild) result["demo"] = building_to_json(level.demo_building);
      if (after == LessonStep::DemoBuild || after == LessonStep::Reconstruct)
        result["puzzle"] = puzzle_view_json(*lesson.puzzle);
      if (after == LessonStep::Complete) {
        result["result"] = reconstruction_to_json(check_reconstruction(*lesson.puzzle, lesson.arrangement));
        result["learned_degrees"] = progress_to_json(s.progress).at("learned_degrees");
      }
      if (after == LessonStep::NewChord) result["level"] = level_view(level);
    }
    return result;
  };

  Json result;
  std::string event_type = type;

  if (type == "start_level") {
    check_fields(action, "start_level", {"type", "level"}, {"time"});
    if (s.mode == SessionMode::Creation) require_mode(s, SessionMode::Menu, type);
    s.lesson = start_level(s.progress, levels_, int_field(action, "level"), time);
    s.mode = SessionMode::Learning;
    result = Json{{"step", std::string(lesson_step_name(s.lesson->step))},
                  {"level", level_view(find_level(levels_, s.lesson->level_id))}};
  } else if (type == "next") {
    check_fields(action, "next", {"type"}, {"time"});
    result = lesson_action(LessonAction{LessonAction::Type::Next, 0, 0, {}, std::nullopt});
    event_type = "step";
  } else if (type == "place") {
    check_fields(action, "place", {"type", "slot", "block"}, {"time"});
    result = lesson_action(LessonAction{LessonAction::Type::Place, 0, int_field(action, "slot"),
                                        block_field(action, "block"), std::nullopt});
    result["slot"] = action.at("slot");
    result["block"] = action.at("block");
  } else if (type == "unplace") {
    check_fields(action, "unplace", {"type", "slot"}, {"time"});
    result = lesson_action(LessonAction{LessonAction::Type::Unplace, 0, int_field(action, "slot"), {}, std::nullopt});
    result["slot"] = action.at("slot");
  } else if (type == "submit") {
    check_fields(action, "submit", {"type"}, {"time", "arrangement"});
    std::optional<Arrangement> arrangement;
    if (action.contains("arrangement")) arrangement = arrangement_field(action);
    result = lesson_action(LessonAction{LessonAction::Type::Submit, 0, 0, {}, arrangement});
  } else if (type == "hint_check") {
    check_fields(action, "hint_check", {"type"}, {"time"});
    std::optional<Hint> hint;
    if (s.mode == SessionMode::Learning && s.lesson) hint = hint_check(*s.lesson, time, options_.hints);
    result = Json{{"hint", hint ? hint_to_json(*hint) : Json(nullptr)}};
    if (!hint) return result;  // nothing to stream
    event_type = "hint";
  } else if (type == "exit") {
    check_fields(action, "exit", {"type"}, {"time"});
    s.mode = SessionMode::Menu;
    s.lesson.reset();
    result = Json{{"mode", "menu"}};
  } else if (type == "enter_creation") {
    check_fields(action, "enter_creation", {"type"}, {"time", "key"});
    if (!creation_unlocked(s.progress))
      throw Error(ErrorCode::LockedLevel, "Creation Mode opens after level 1 is complete", 1);
    if (s.mode == SessionMode::Learning) s.lesson.reset();
    if (action.contains("key")) s.workspace = Workspace(parse_key(string_field(action, "key")));
    s.mode = SessionMode::Creation;
    result = Json{{"mode", "creation"}, {"key", std::string(s.workspace.key().name())}};
  } else if (type == "assemble") {
    check_fields(action, "assemble", {"type", "degree"}, {"time", "tenon", "mortise"});
    require_mode(s, SessionMode::Creation, type);
    std::optional<TenonProfile> tenon;
    std::optional<MortiseProfile> mortise;
    if (action.contains("tenon")) tenon = TenonProfile{function_set_from_json(action.at("tenon"))};
    if (action.contains("mortise")) mortise = MortiseProfile{function_set_from_json(action.at("mortise"))};
    const MusicalBlock b = assemble(s.progress, parse_degree(string_field(action, "degree")), tenon, mortise);
    const BlockId id = s.workspace.add_block(b);
    result = Json{{"block", block_view(s.workspace.block(id))}};
  } else if (type == "place_first") {
    check_fields(action, "place_first", {"type", "block", "x"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    s.workspace.place_first(block_field(action, "block"), number_field(action, "x"));
    result = Json{{"row", workspace_to_json(s.workspace).at("row")}};
  } else if (type == "move") {
    check_fields(action, "move", {"type", "block", "x", "y"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    s.workspace.move_detached(block_field(action, "block"),
                              LayoutPosition{number_field(action, "x"), int_field(action, "y")});
    result = Json{{"block", action.at("block")}};
  } else if (type == "probe") {
    check_fields(action, "probe", {"type", "block", "x", "y"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    const SnapEvent e = s.workspace.probe(block_field(action, "block"),
                                          LayoutPosition{number_field(action, "x"), int_field(action, "y")});
    result = Json{{"block", action.at("block")}, {"snap", snap_event_to_json(e)}};
    event_type = "snap";
  } else if (type == "attach") {
    check_fields(action, "attach", {"type", "block", "target", "side"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    s.workspace.attach(block_field(action, "block"), block_field(action, "target"),
                       parse_side(string_field(action, "side")));
    const Json ws = workspace_to_json(s.workspace);
    result = Json{{"row", ws.at("row")}, {"stacks", ws.at("stacks")}};
  } else if (type == "detach") {
    check_fields(action, "detach", {"type", "block"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    s.workspace.detach(block_field(action, "block"));
    const Json ws = workspace_to_json(s.workspace);
    result = Json{{"row", ws.at("row")}, {"stacks", ws.at("stacks")}};
  } else if (type == "remove") {
    check_fields(action, "remove", {"type", "block"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    s.workspace.remove(block_field(action, "block"));
    result = Json{{"block", action.at("block")}};
  } else if (type == "finalize") {
    check_fields(action, "finalize", {"type", "name"}, {"time"});
    require_mode(s, SessionMode::Creation, type);
    FinalizeOptions fo;
    fo.created_at = static_cast<std::int64_t>(time);
    fo.author_session = s.id;
    fo.max_surface_chords = options_.max_surface_chords;
    Composition c = finalize(s.workspace, string_field(action, "name"), fo);
    result = Json{{"composition", composition_to_json(c)}, {"surface", surface_json(flatten(c.building))}};
    s.compositions.push_back(std::move(c));
  } else if (type == "play") {
    check_fields(action, "play", {"type"}, {"time", "composition"});
    PlaybackOptions opts;
    Building b;
    if (s.mode == SessionMode::Learning && s.lesson) {
      const Level& level = find_level(levels_, s.lesson->level_id);
      b = level.demo_building;
      if (level.playback) opts = *level.playback;
    } else if (s.mode == SessionMode::Creation) {
      if (action.contains("composition")) {
        const int idx = int_field(action, "composition");
        if (idx < 0 || idx >= static_cast<int>(s.compositions.size()))
          throw Error(ErrorCode::NotFound, "no composition " + std::to_string(idx), idx);
        b = s.compositions[static_cast<std::size_t>(idx)].building;
      } else {
        b = s.workspace.to_building();
        ValidationReport report = validate_building(b);
        if (!report.ok()) throw ValidationFailedError(std::move(report));
      }
    } else {
      throw Error(ErrorCode::IllegalTransition, "nothing to play from the menu");
    }
    result = Json{{"surface", surface_json(flatten(b))},
                  {"tempo_bpm", opts.tempo_bpm},
                  {"ticks_per_quarter", kTicksPerQuarter},
                  {"events", playback_to_json(playback_events(b, opts))}};
    event_type = "playback";
  } else {
    throw Error(ErrorCode::SchemaViolation, "unknown action type '" + type + "'");
  }

  Json data = result;
  data["action"] = type;
  s.log(event_type, std::move(data));
  return result;
}

std::vector<SessionEvent> Engine::events_since(const std::string& id, std::uint64_t since,
                                               std::chrono::milliseconds wait) {
  auto slot = find_slot(id);
  std::unique_lock lock(slot->mu);
  auto ready = [&] { return shutdown_.load() || slot->session.next_event_seq - 1 > since; };
  if (wait.count() > 0) slot->cv.wait_for(lock, wait, ready);
  std::vector<SessionEvent> out;
  for (const auto& e : slot->session.events)
    if (e.seq > since) out.push_back(e);
  return out;
}

ApiResponse Engine::handle(std::string_view method, std::string_view target, std::string_view body) {
  const auto [path, query] = split_target(target);
  const auto parts = split_path(path);
  auto json_response = [](const Json& j, int status = 200) {
    return ApiResponse{status, "application/json", j.dump()};
  };
  auto body_json = [&]() -> Json {
    if (body.empty()) return Json::object();
    return parse_document(body);
  };

  try {
    if (method == "GET" && parts.size() == 1 && parts[0] == "levels") return json_response(list_levels());
    if (method == "GET" && parts.size() == 1 && parts[0] == "matrix") {
      const auto key = query_param(query, "key");
      return json_response(matrix(key ? parse_key(*key) : c_major()));
    }
    if (method == "POST" && parts.size() == 1 && parts[0] == "analyze") return json_response(analyze(body_json()));
    if (method == "POST" && parts.size() == 1 && parts[0] == "validate") {
      const Json doc = body_json();
      return json_response(validate(doc.contains("building") ? doc.at("building") : doc));
    }
    if (method == "POST" && parts.size() == 1 && parts[0] == "render") {
      const auto bytes = render(body_json());
      return ApiResponse{200, "audio/midi", std::string(bytes.begin(), bytes.end())};
    }
    if (parts.size() >= 1 && parts[0] == "sessions") {
      if (method == "POST" && parts.size() == 1) {
        const Json req = body_json();
        check_fields(req, "create session", {}, {"id"});
        std::optional<std::string> id;
        if (req.contains("id")) id = string_field(req, "id");
        return json_response(create_session(id), 201);
      }
      if (parts.size() >= 2) {
        const std::string id(parts[1]);
        if (method == "GET" && parts.size() == 2) return json_response(get_session(id));
        if (method == "POST" && parts.size() == 3 && parts[2] == "actions")
          return json_response(post_action(id, body_json()));
        if (method == "GET" && parts.size() == 3 && parts[2] == "events") {
          std::uint64_t since = 0;
          if (auto s = query_param(query, "since")) since = std::strtoull(s->c_str(), nullptr, 10);
          const auto ready = events_since(id, since);
          if (query_param(query, "format") == std::optional<std::string>("ndjson")) {
            std::string lines;
            for (const auto& e : ready) lines += event_to_json(e).dump() + "\n";
            return ApiResponse{200, "application/x-ndjson", std::move(lines)};
          }
          Json events = Json::array();
          for (const auto& e : ready) events.push_back(event_to_json(e));
          return json_response(ok(Json{{"events", events}}));
        }
      }
    }
    throw Error(ErrorCode::NotFound, std::string(method) + " " + std::string(path) + " is not an endpoint");
  } catch (const ValidationFailedError& e) {
    return json_response(error_body(e, report_to_json(e.report())), http_status_for(e.code()));
  } catch (const ActionError& e) {
    return json_response(error_body(e, e.details()), http_status_for(e.code()));
  } catch (const Error& e) {
    return json_response(error_body(e), http_status_for(e.code()));
  } catch (const Json::exception& e) {
    return json_response(error_body(Error(ErrorCode::SchemaViolation, e.what())), 400);
  }
}

}  // namespace hblocks
