#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hblocks/creation.h"
#include "hblocks/grammar.h"
#include "hblocks/layout.h"
#include "hblocks/learning.h"
#include "hblocks/session.h"

namespace hblocks {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& doc);
// Throws SchemaViolation on malformed text.
Json parse_document(std::string_view text);

// Rejects fields outside `required` + `optional` and missing required ones.
void check_fields(const Json& obj, std::string_view context, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional = {});

Json function_set_to_json(FunctionSet fs);
FunctionSet function_set_from_json(const Json& j);

// Block record with id, used by workspace and puzzle documents.
Json block_to_json(const MusicalBlock& b);
MusicalBlock block_from_json(const Json& j);

Json symbol_to_json(const BlockSymbol& s);

// BuildingDoc. Ids are not stored; reading assigns 1..n in canonical order.
// Reading checks the schema only, so invalid assemblies can still be reported.
Json building_to_json(const Building& b);
Building building_from_json(const Json& j);

Json level_to_json(const Level& level);
Level level_from_json(const Json& j);

Json composition_to_json(const Composition& c);
Composition composition_from_json(const Json& j);

Json workspace_to_json(const Workspace& ws);
Workspace workspace_from_json(const Json& j);

Json progress_to_json(const Progress& p);
Progress progress_from_json(const Json& j);

Json puzzle_to_json(const Puzzle& p);
Puzzle puzzle_from_json(const Json& j);
// Client view: skeleton and shuffled blocks without the chord-per-slot answer.
Json puzzle_view_json(const Puzzle& p);

Json hint_to_json(const Hint& h);
Json lesson_to_json(const LessonState& s);
LessonState lesson_from_json(const Json& j);

Json session_to_json(const Session& s);
Session session_from_json(const Json& j);

Json violation_to_json(const Violation& v);
Json report_to_json(const ValidationReport& r);
Json reconstruction_to_json(const ReconstructionResult& r);
Json snap_event_to_json(const SnapEvent& e);
Json playback_to_json(const std::vector<PlaybackEvent>& events);
Json parse_tree_to_json(const ParseTree& t);

}  // namespace hblocks
