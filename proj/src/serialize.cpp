#include "hblocks/serialize.h"

#include <algorithm>
#include <string>

#include "hblocks/errors.h"

namespace hblocks {

namespace {

[[noreturn]] void schema_error(std::string_view context, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, std::string(context) + ": " + what);
}

// Typed field access; any type mismatch is a schema violation.
template <typename T>
T get(const Json& obj, std::string_view context, const char* field) {
  const Json& v = obj.at(field);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) schema_error(context, std::string("'") + field + "' must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) schema_error(context, std::string("'") + field + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
          schema_error(context, std::string("'") + field + "' must be nonnegative");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) schema_error(context, std::string("'") + field + "' must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) schema_error(context, std::string("'") + field + "' must be a string");
    }
    return v.get<T>();
  } catch (const Json::exception& e) {
    schema_error(context, std::string("'") + field + "': " + e.what());
  }
}

const Json& get_array(const Json& obj, std::string_view context, const char* field) {
  const Json& v = obj.at(field);
  if (!v.is_array()) schema_error(context, std::string("'") + field + "' must be an array");
  return v;
}

const Json& get_object(const Json& obj, std::string_view context, const char* field) {
  const Json& v = obj.at(field);
  if (!v.is_object()) schema_error(context, std::string("'") + field + "' must be an object");
  return v;
}

Degree degree_field(const Json& obj, std::string_view context, const char* field) {
  const std::string text = get<std::string>(obj, context, field);
  try {
    return parse_degree(text);
  } catch (const Error& e) {
    schema_error(context, e.what());
  }
}

Degree degree_value(const Json& v, std::string_view context) {
  if (!v.is_string()) schema_error(context, "degree labels must be strings");
  try {
    return parse_degree(v.get<std::string>());
  } catch (const Error& e) {
    schema_error(context, e.what());
  }
}

Key key_field(const Json& obj, std::string_view context) {
  try {
    return parse_key(get<std::string>(obj, context, "key"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    schema_error(context, e.what());
  }
}

void check_schema_version(const Json& j, std::string_view context) {
  if (get<int>(j, context, "schema_version") != kSchemaVersion)
    schema_error(context, "unsupported schema_version (expected 1)");
}

Json key_json(const Key& k) { return std::string(k.name()); }

}  // namespace

std::string canonical_dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("malformed document: ") + e.what());
  }
}

void check_fields(const Json& obj, std::string_view context, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional) {
  if (!obj.is_object()) schema_error(context, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                       std::find(optional.begin(), optional.end(), k) != optional.end();
    if (!known) schema_error(context, "unknown field '" + k + "'");
  }
  for (auto k : required)
    if (!obj.contains(std::string(k))) schema_error(context, "missing field '" + std::string(k) + "'");
}

Json function_set_to_json(FunctionSet fs) {
  Json out = Json::array();
  fs.for_each([&](HarmonicFunction f) { out.push_back(std::string(function_name(f))); });
  return out;
}

FunctionSet function_set_from_json(const Json& j) {
  if (!j.is_array()) schema_error("function list", "expected an array");
  FunctionSet fs;
  for (const auto& v : j) {
    if (!v.is_string()) schema_error("function list", "function names must be strings");
    try {
      fs.insert(parse_function(v.get<std::string>()));
    } catch (const Error& e) {
      schema_error("function list", e.what());
    }
  }
  return fs;
}

Json symbol_to_json(const BlockSymbol& s) {
  Json shapes = Json::array({std::string(shape_name(s.primary))});
  if (s.composition != BlockSymbol::Composition::Single) shapes.push_back(std::string(shape_name(s.secondary)));
  return Json{{"composition", std::string(composition_name(s.composition))}, {"shapes", shapes}};
}

Json block_to_json(const MusicalBlock& b) {
  return Json{{"id", b.id.value},
              {"degree", std::string(roman_label(b.degree))},
              {"tenon", function_set_to_json(b.tenon.allowed_successor_functions)},
              {"mortise", function_set_to_json(b.mortise.accepted_own_functions)}};
}

MusicalBlock block_from_json(const Json& j) {
  constexpr std::string_view ctx = "block";
  check_fields(j, ctx, {"id", "degree", "tenon", "mortise"});
  const Degree d = degree_field(j, ctx, "degree");
  return make_block(d, TenonProfile{function_set_from_json(j.at("tenon"))},
                    MortiseProfile{function_set_from_json(j.at("mortise"))},
                    BlockId{get<std::uint64_t>(j, ctx, "id")});
}

Json building_to_json(const Building& b) {
  Json base = Json::array();
  for (const auto& blk : b.base)
    base.push_back(Json{{"degree", std::string(roman_label(blk.degree))},
                        {"tenon", function_set_to_json(blk.tenon.allowed_successor_functions)},
                        {"mortise", function_set_to_json(blk.mortise.accepted_own_functions)}});
  Json prolongations = Json::array();
  for (const auto& p : b.prolongations) {
    Json inner = Json::array();
    for (const auto& blk : p.inner) inner.push_back(std::string(roman_label(blk.degree)));
    prolongations.push_back(
        Json{{"kind", std::string(prolongation_name(p.kind))}, {"anchor", p.anchor}, {"inner", inner}});
  }
  return Json{{"key", key_json(b.key)}, {"base", base}, {"prolongations", prolongations}};
}

Building building_from_json(const Json& j) {
  constexpr std::string_view ctx = "building";
  check_fields(j, ctx, {"key", "base"}, {"prolongations"});
  Building b{key_field(j, ctx), {}, {}};
  for (const auto& e : get_array(j, ctx, "base")) {
    check_fields(e, "base block", {"degree"}, {"tenon", "mortise"});
    const Degree d = degree_field(e, "base block", "degree");
    std::optional<TenonProfile> tenon;
    std::optional<MortiseProfile> mortise;
    if (e.contains("tenon")) tenon = TenonProfile{function_set_from_json(e.at("tenon"))};
    if (e.contains("mortise")) mortise = MortiseProfile{function_set_from_json(e.at("mortise"))};
    b.base.push_back(make_block(d, tenon, mortise));
  }
  if (j.contains("prolongations")) {
    for (const auto& e : get_array(j, ctx, "prolongations")) {
      check_fields(e, "prolongation", {"kind", "anchor", "inner"});
      Prolongation p;
      try {
        p.kind = parse_prolongation_kind(get<std::string>(e, "prolongation", "kind"));
      } catch (const Error& err) {
        schema_error("prolongation", err.what());
      }
      p.anchor = get<int>(e, "prolongation", "anchor");
      for (const auto& v : get_array(e, "prolongation", "inner")) p.inner.push_back(make_block(degree_value(v, ctx)));
      b.prolongations.push_back(std::move(p));
    }
  }
  renumber_blocks(b);
  return b;
}

Json level_to_json(const Level& level) {
  Json j{{"schema_version", kSchemaVersion},
         {"level_id", level.id},
         {"teaches", std::string(roman_label(level.teaches))},
         {"key", key_json(level.key)},
         {"intro_text", level.intro_text},
         {"includes_basics", level.includes_basics},
         {"demo_building", building_to_json(level.demo_building)},
         {"puzzle_seed", level.puzzle_seed}};
  if (level.playback)
    j["playback"] = Json{{"tempo_bpm", level.playback->tempo_bpm},
                         {"chord_beats", level.playback->chord_beats},
                         {"velocity", level.playback->velocity}};
  return j;
}

Level level_from_json(const Json& j) {
  constexpr std::string_view ctx = "level";
  check_fields(j, ctx,
               {"schema_version", "level_id", "teaches", "key", "intro_text", "includes_basics", "demo_building",
                "puzzle_seed"},
               {"playback"});
  check_schema_version(j, ctx);
  Level level;
  level.id = get<int>(j, ctx, "level_id");
  level.teaches = degree_field(j, ctx, "teaches");
  level.key = key_field(j, ctx);
  level.intro_text = get<std::string>(j, ctx, "intro_text");
  level.includes_basics = get<bool>(j, ctx, "includes_basics");
  level.demo_building = building_from_json(get_object(j, ctx, "demo_building"));
  level.puzzle_seed = get<std::uint64_t>(j, ctx, "puzzle_seed");
  if (j.contains("playback")) {
    const Json& p = get_object(j, ctx, "playback");
    check_fields(p, "playback", {"tempo_bpm", "chord_beats", "velocity"});
    level.playback = PlaybackOptions{get<int>(p, "playback", "tempo_bpm"), get<int>(p, "playback", "chord_beats"),
                                     get<int>(p, "playback", "velocity")};
  }
  return level;
}

Json composition_to_json(const Composition& c) {
  return Json{{"schema_version", kSchemaVersion},
              {"name", c.name},
              {"created_at", c.created_at},
              {"author_session", c.author_session},
              {"building", building_to_json(c.building)}};
}

Composition composition_from_json(const Json& j) {
  constexpr std::string_view ctx = "composition";
  check_fields(j, ctx, {"schema_version", "name", "created_at", "author_session", "building"});
  check_schema_version(j, ctx);
  return Composition{get<std::string>(j, ctx, "name"), building_from_json(get_object(j, ctx, "building")),
                     get<std::int64_t>(j, ctx, "created_at"), get<std::string>(j, ctx, "author_session")};
}

Json workspace_to_json(const Workspace& ws) {
  const auto& st = ws.state();
  Json blocks = Json::array();
  for (const auto& [id, e] : st.entries) {
    Json b = block_to_json(e.block);
    b["drag"] = e.drag_position ? Json{{"x", e.drag_position->x}, {"y", e.drag_position->y}} : Json(nullptr);
    blocks.push_back(std::move(b));
  }
  Json row = Json::array();
  for (BlockId id : st.row) row.push_back(id.value);
  Json stacks = Json::array();
  for (const auto& s : st.stacks) {
    Json inner = Json::array();
    for (BlockId id : s.inner) inner.push_back(id.value);
    stacks.push_back(
        Json{{"kind", std::string(prolongation_name(s.kind))}, {"anchor", s.anchor.value}, {"inner", inner}});
  }
  return Json{{"key", key_json(st.key)},
              {"config",
               {{"snap_radius", st.config.snap_radius},
                {"block_size", st.config.block_size},
                {"tenon_depth", st.config.tenon_depth}}},
              {"blocks", blocks},
              {"row", row},
              {"origin", st.origin},
              {"stacks", stacks},
              {"next_id", st.next_id}};
}

Workspace workspace_from_json(const Json& j) {
  constexpr std::string_view ctx = "workspace";
  check_fields(j, ctx, {"key", "config", "blocks", "row", "origin", "stacks", "next_id"});
  Workspace::State st;
  st.key = key_field(j, ctx);
  const Json& cfg = get_object(j, ctx, "config");
  check_fields(cfg, "layout config", {"snap_radius", "block_size", "tenon_depth"});
  st.config = LayoutConfig{get<double>(cfg, ctx, "snap_radius"), get<double>(cfg, ctx, "block_size"),
                           get<double>(cfg, ctx, "tenon_depth")};
  for (const auto& e : get_array(j, ctx, "blocks")) {
    Json copy = e;
    if (!copy.is_object() || !copy.contains("drag")) schema_error(ctx, "block entry missing 'drag'");
    const Json drag = copy["drag"];
    copy.erase("drag");
    Workspace::Entry entry{block_from_json(copy), std::nullopt};
    if (!drag.is_null()) {
      check_fields(drag, "drag", {"x", "y"});
      entry.drag_position = LayoutPosition{get<double>(drag, ctx, "x"), get<int>(drag, ctx, "y")};
    }
    st.entries.emplace(entry.block.id, entry);
  }
  auto id_of = [&](const Json& v) {
    if (!v.is_number_unsigned()) schema_error(ctx, "block ids must be nonnegative integers");
    const BlockId id{v.get<std::uint64_t>()};
    if (!st.entries.count(id)) schema_error(ctx, "reference to unknown block " + std::to_string(id.value));
    return id;
  };
  for (const auto& v : get_array(j, ctx, "row")) st.row.push_back(id_of(v));
  st.origin = get<int>(j, ctx, "origin");
  for (const auto& e : get_array(j, ctx, "stacks")) {
    check_fields(e, "stack", {"kind", "anchor", "inner"});
    Workspace::Stack s;
    try {
      s.kind = parse_prolongation_kind(get<std::string>(e, ctx, "kind"));
    } catch (const Error& err) {
      schema_error(ctx, err.what());
    }
    s.anchor = id_of(e.at("anchor"));
    for (const auto& v : get_array(e, ctx, "inner")) s.inner.push_back(id_of(v));
    st.stacks.push_back(std::move(s));
  }
  st.next_id = get<std::uint64_t>(j, ctx, "next_id");
  return Workspace::from_state(std::move(st));
}

Json progress_to_json(const Progress& p) {
  Json stats = Json::array();
  for (const auto& [id, s] : p.stats())
    stats.push_back(Json{{"level_id", id}, {"completions", s.completions}, {"best_submissions", s.best_submissions}});
  Json learned = Json::array();
  for (Degree d : p.learned_degrees()) learned.push_back(std::string(roman_label(d)));
  return Json{{"completed_levels", p.completed_levels()}, {"learned_degrees", learned}, {"stats", stats}};
}

Progress progress_from_json(const Json& j) {
  constexpr std::string_view ctx = "progress";
  check_fields(j, ctx, {"completed_levels", "learned_degrees", "stats"});
  std::set<int> completed;
  for (const auto& v : get_array(j, ctx, "completed_levels")) {
    if (!v.is_number_integer()) schema_error(ctx, "level ids must be integers");
    completed.insert(v.get<int>());
  }
  std::map<int, LevelStats> stats;
  for (const auto& e : get_array(j, ctx, "stats")) {
    check_fields(e, "level stats", {"level_id", "completions", "best_submissions"});
    stats[get<int>(e, ctx, "level_id")] =
        LevelStats{get<int>(e, ctx, "completions"), get<int>(e, ctx, "best_submissions")};
  }
  Progress p = Progress::restore(std::move(completed), std::move(stats));
  std::set<Degree> learned;
  for (const auto& v : get_array(j, ctx, "learned_degrees")) learned.insert(degree_value(v, ctx));
  if (learned != p.learned_degrees()) schema_error(ctx, "learned_degrees disagree with completed_levels");
  return p;
}

Json puzzle_to_json(const Puzzle& p) {
  Json order = Json::array();
  for (const auto& b : p.blocks) order.push_back(b.id.value);
  return Json{{"target", building_to_json(p.target)}, {"order", order}};
}

Puzzle puzzle_from_json(const Json& j) {
  constexpr std::string_view ctx = "puzzle";
  check_fields(j, ctx, {"target", "order"});
  const Building target = building_from_json(get_object(j, ctx, "target"));
  Puzzle p = shuffle_puzzle(target, 0);
  std::vector<MusicalBlock> blocks;
  for (const auto& v : get_array(j, ctx, "order")) {
    if (!v.is_number_unsigned()) schema_error(ctx, "block ids must be nonnegative integers");
    const MusicalBlock* b = p.find_block(BlockId{v.get<std::uint64_t>()});
    if (!b) schema_error(ctx, "order references an unknown block");
    blocks.push_back(*b);
  }
  if (blocks.size() != p.blocks.size()) schema_error(ctx, "order must list every block once");
  std::vector<BlockId> ids;
  for (const auto& b : blocks) ids.push_back(b.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) schema_error(ctx, "order repeats a block");
  p.blocks = std::move(blocks);
  return p;
}

Json puzzle_view_json(const Puzzle& p) {
  Json slots = Json::array();
  for (const auto& s : p.skeleton) {
    Json slot{{"index", s.index}, {"row", s.row}, {"anchor", s.anchor}, {"position", s.position}};
    slot["kind"] = s.kind ? Json(std::string(prolongation_name(*s.kind))) : Json(nullptr);
    slots.push_back(std::move(slot));
  }
  Json blocks = Json::array();
  for (const auto& b : p.blocks) {
    Json jb = block_to_json(b);
    jb["symbol"] = symbol_to_json(b.symbol);
    blocks.push_back(std::move(jb));
  }
  return Json{{"key", key_json(p.target.key)}, {"slots", slots}, {"blocks", blocks}};
}

Json hint_to_json(const Hint& h) {
  return Json{{"trigger", std::string(hint_trigger_name(h.trigger))},
              {"slot", h.slot},
              {"chord", std::string(roman_label(h.chord))},
              {"time", h.time},
              {"text", h.text}};
}

namespace {

Hint hint_from_json(const Json& j) {
  constexpr std::string_view ctx = "hint";
  check_fields(j, ctx, {"trigger", "slot", "chord", "time", "text"});
  Hint h;
  const std::string trig = get<std::string>(j, ctx, "trigger");
  if (trig == "idle")
    h.trigger = Hint::Trigger::Idle;
  else if (trig == "repeated_failure")
    h.trigger = Hint::Trigger::RepeatedFailure;
  else
    schema_error(ctx, "unknown trigger '" + trig + "'");
  h.slot = get<int>(j, ctx, "slot");
  h.chord = degree_field(j, ctx, "chord");
  h.time = get<double>(j, ctx, "time");
  h.text = get<std::string>(j, ctx, "text");
  return h;
}

Json arrangement_to_json(const Arrangement& a) {
  Json out = Json::array();
  for (const auto& [slot, id] : a) out.push_back(Json{{"slot", slot}, {"block", id.value}});
  return out;
}

}  // namespace

Json lesson_to_json(const LessonState& s) {
  Json emitted = Json::array();
  for (const auto& h : s.hints.emitted_hints) emitted.push_back(hint_to_json(h));
  return Json{{"level_id", s.level_id},
              {"step", std::string(lesson_step_name(s.step))},
              {"puzzle", s.puzzle ? puzzle_to_json(*s.puzzle) : Json(nullptr)},
              {"arrangement", arrangement_to_json(s.arrangement)},
              {"submissions", s.submissions},
              {"hints",
               {{"last_action_time", s.hints.last_action_time},
                {"failed_connect_attempts", s.hints.failed_connect_attempts},
                {"emitted", emitted}}}};
}

LessonState lesson_from_json(const Json& j) {
  constexpr std::string_view ctx = "lesson";
  check_fields(j, ctx, {"level_id", "step", "puzzle", "arrangement", "submissions", "hints"});
  LessonState s;
  s.level_id = get<int>(j, ctx, "level_id");
  s.step = parse_lesson_step(get<std::string>(j, ctx, "step"));
  if (!j.at("puzzle").is_null()) s.puzzle = puzzle_from_json(j.at("puzzle"));
  for (const auto& e : get_array(j, ctx, "arrangement")) {
    check_fields(e, "arrangement entry", {"slot", "block"});
    s.arrangement[get<int>(e, ctx, "slot")] = BlockId{get<std::uint64_t>(e, ctx, "block")};
  }
  s.submissions = get<int>(j, ctx, "submissions");
  const Json& h = get_object(j, ctx, "hints");
  check_fields(h, "hint state", {"last_action_time", "failed_connect_attempts", "emitted"});
  s.hints.last_action_time = get<double>(h, ctx, "last_action_time");
  s.hints.failed_connect_attempts = get<int>(h, ctx, "failed_connect_attempts");
  for (const auto& e : get_array(h, ctx, "emitted")) s.hints.emitted_hints.push_back(hint_from_json(e));
  return s;
}

Json session_to_json(const Session& s) {
  Json compositions = Json::array();
  for (const auto& c : s.compositions) compositions.push_back(composition_to_json(c));
  Json events = Json::array();
  for (const auto& e : s.events)
    events.push_back(Json{{"seq", e.seq}, {"time", e.time}, {"type", e.type}, {"data", e.data}});
  return Json{{"schema_version", kSchemaVersion},
              {"id", s.id},
              {"mode", std::string(session_mode_name(s.mode))},
              {"clock", s.clock},
              {"progress", progress_to_json(s.progress)},
              {"lesson", s.lesson ? lesson_to_json(*s.lesson) : Json(nullptr)},
              {"workspace", workspace_to_json(s.workspace)},
              {"compositions", compositions},
              {"events", events},
              {"next_event_seq", s.next_event_seq}};
}

Session session_from_json(const Json& j) {
  constexpr std::string_view ctx = "session";
  check_fields(j, ctx,
               {"schema_version", "id", "mode", "clock", "progress", "lesson", "workspace", "compositions", "events",
                "next_event_seq"});
  check_schema_version(j, ctx);
  Session s;
  s.id = get<std::string>(j, ctx, "id");
  s.mode = parse_session_mode(get<std::string>(j, ctx, "mode"));
  s.clock = get<double>(j, ctx, "clock");
  s.progress = progress_from_json(j.at("progress"));
  if (!j.at("lesson").is_null()) s.lesson = lesson_from_json(j.at("lesson"));
  s.workspace = workspace_from_json(j.at("workspace"));
  for (const auto& c : get_array(j, ctx, "compositions")) s.compositions.push_back(composition_from_json(c));
  for (const auto& e : get_array(j, ctx, "events")) {
    check_fields(e, "event", {"seq", "time", "type", "data"});
    s.events.push_back(SessionEvent{get<std::uint64_t>(e, ctx, "seq"), get<double>(e, ctx, "time"),
                                    get<std::string>(e, ctx, "type"), e.at("data")});
  }
  s.next_event_seq = get<std::uint64_t>(j, ctx, "next_event_seq");
  return s;
}

Json violation_to_json(const Violation& v) {
  Json ids = Json::array();
  for (BlockId id : v.blocks) ids.push_back(id.value);
  return Json{{"code", std::string(error_code_name(v.code))}, {"index", v.index}, {"blocks", ids},
              {"message", v.message}};
}

Json report_to_json(const ValidationReport& r) {
  Json vs = Json::array();
  for (const auto& v : r.violations) vs.push_back(violation_to_json(v));
  return Json{{"ok", r.ok()}, {"violations", vs}};
}

Json reconstruction_to_json(const ReconstructionResult& r) {
  Json vs = Json::array();
  for (const auto& v : r.violations) vs.push_back(violation_to_json(v));
  return Json{{"status", std::string(reconstruction_status_name(r.status))},
              {"correct_slots", r.correct_slots},
              {"violations", vs}};
}

Json snap_event_to_json(const SnapEvent& e) {
  return Json{{"kind", std::string(snap_kind_name(e.kind))},
              {"target", e.target ? Json(e.target->value) : Json(nullptr)},
              {"side", e.side ? Json(std::string(side_name(*e.side))) : Json(nullptr)},
              {"click_sound", e.click_sound}};
}

Json playback_to_json(const std::vector<PlaybackEvent>& events) {
  Json out = Json::array();
  for (const auto& e : events)
    out.push_back(Json{{"tick", e.tick},
                       {"kind", std::string(playback_kind_name(e.kind))},
                       {"note", e.note},
                       {"velocity", e.velocity},
                       {"chord_index", e.chord_index}});
  return out;
}

Json parse_tree_to_json(const ParseTree& t) {
  Json labels = Json::array();
  for (auto k : t.labels) labels.push_back(std::string(structure_name(k)));
  Json surface = Json::array();
  for (Degree d : flatten(t.root)) surface.push_back(std::string(roman_label(d)));
  return Json{{"building", building_to_json(t.root)}, {"labels", labels}, {"surface", surface},
              {"summary", describe(t.root)}};
}

}  // namespace hblocks
