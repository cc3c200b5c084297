// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   hblocks_acceptance [--cli path/to/hblocks] [--python python3] [--scripts tests/]
//
// The CLI and Python paths are optional; without them the checks that shell
// out (levels check, the mido reader, the CLI-only flow) are skipped and the
// line says so.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "hblocks/audio.h"
#include "hblocks/engine.h"
#include "hblocks/serialize.h"
#include "oracles.h"
#include "test_util.h"

using namespace hblocks;
namespace fs = std::filesystem;

namespace {

struct Tools {
  std::string cli;
  std::string python;
  std::string scripts;
};

// Collects the first few problems of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (problems_.size() < 5) problems_.push_back(what);
    ++failures_;
  }
  void note(const std::string& n) { notes_.push_back(n); }
  bool passed() const { return failures_ == 0; }
  std::string summary() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    for (const auto& p : problems_) out += (out.empty() ? "" : "; ") + p;
    if (failures_ > static_cast<int>(problems_.size()))
      out += " (+" + std::to_string(failures_ - static_cast<int>(problems_.size())) + " more)";
    return out;
  }

 private:
  std::vector<std::string> notes_, problems_;
  int failures_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (int x : v) out += (out.empty() ? "" : " ") + std::to_string(x);
  return out;
}

// --- criteria -----------------------------------------------------------------

void compatibility(Check& c, const Tools&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::set<std::pair<int, int>> forbidden;
  for (int a = 1; a <= 7; ++a)
    for (int b = 1; b <= 7; ++b) {
      const bool got = can_connect(make_block(degree_from_number(a)), make_block(degree_from_number(b)));
      c.expect(got == oracle::connects(a, b), "pair " + std::to_string(a) + "->" + std::to_string(b));
      if (!got) forbidden.insert({a, b});
    }
  const double took = seconds_since(t0);
  c.expect(forbidden == oracle::forbidden_pairs(), "forbidden set differs from {V,vii}x{IV,ii}");
  c.expect(forbidden.size() == 4, std::to_string(forbidden.size()) + " forbidden pairs");
  c.expect(took < 1.0, "took " + fmt_seconds(took));
  c.note("49 pairs, " + std::to_string(forbidden.size()) + " forbidden, " + fmt_seconds(took));
}

void grammar(Check& c, const Tools&) {
  const auto t0 = std::chrono::steady_clock::now();
  int total = 0, parsed = 0;
  for (int len = 1; len <= 4; ++len)
    for (const auto& s : testing::all_sequences(len)) {
      ++total;
      const std::string label = "[" + join(s) + "]";
      if (len >= 2) {
        const auto kind = classify_segment(testing::degrees(s), c_major());
        const char want = oracle::classify(s);
        const char got = !kind ? 0
                         : *kind == StructureKind::Neighbor ? 'N'
                         : *kind == StructureKind::Passing  ? 'P'
                                                            : 'R';
        c.expect(got == want, "classify " + label);
      }
      std::optional<int> first_break;
      for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (!oracle::connects(s[i], s[i + 1])) {
          first_break = static_cast<int>(i);
          break;
        }
      try {
        const ParseTree t = parse_building(testing::degrees(s), c_major());
        ++parsed;
        c.expect(!first_break, "parsed broken " + label);
        c.expect(testing::numbers(flatten(t.root)) == s, "flatten(parse) != id for " + label);
        const oracle::Decomposition want = oracle::best_decomposition(s);
        std::vector<int> base;
        for (const auto& b : t.root.base) base.push_back(degree_number(b.degree));
        bool same = base == want.base && t.root.prolongations.size() == want.prolongations.size();
        for (std::size_t k = 0; same && k < want.prolongations.size(); ++k) {
          const auto& [kind, anchor, inner] = want.prolongations[k];
          const auto& p = t.root.prolongations[k];
          std::vector<int> got_inner;
          for (const auto& b : p.inner) got_inner.push_back(degree_number(b.degree));
          same = (p.kind == ProlongationKind::Neighbor) == (kind == 'N') && p.anchor == anchor && got_inner == inner;
        }
        c.expect(same, "decomposition differs from oracle for " + label);
      } catch (const Error& e) {
        c.expect(first_break && e.code() == ErrorCode::UnparseableSequence && e.index() == first_break,
                 "unexpected " + std::string(error_code_name(e.code())) + " for " + label);
      }
    }
  const double took = seconds_since(t0);
  c.expect(total == 2800, std::to_string(total) + " sequences");
  c.expect(took < 10.0, "took " + fmt_seconds(took));
  c.note(std::to_string(total) + " sequences, " + std::to_string(parsed) + " parsed, " + fmt_seconds(took));
}

void content(Check& c, const Tools& tools) {
  const std::vector<Level> levels = level_sequence(testing::stock_content());
  const Degree order[] = {Degree::I, Degree::IV, Degree::V, Degree::ii, Degree::iii, Degree::vi, Degree::vii};
  c.expect(levels.size() == 7, std::to_string(levels.size()) + " levels");
  std::set<Degree> taught;
  bool twinkle = false;
  for (std::size_t i = 0; i < levels.size() && i < 7; ++i) {
    const Level& l = levels[i];
    c.expect(l.teaches == order[i], "level " + std::to_string(l.id) + " teaches the wrong chord");
    taught.insert(l.teaches);
    c.expect(validate_building(l.demo_building).ok(), "level " + std::to_string(l.id) + " demo invalid");
    for (Degree d : flatten(l.demo_building))
      c.expect(taught.count(d) != 0, "level " + std::to_string(l.id) + " uses untaught " + std::string(roman_label(d)));
    if (flatten(l.demo_building) == testing::seq("I I IV I IV I V I")) twinkle = true;
  }
  c.expect(twinkle, "no level carries the Twinkle building");
  if (!tools.cli.empty()) {
    const int rc = run("\"" + tools.cli + "\" levels check \"" + testing::stock_content().string() + "\"");
    c.expect(rc == 0, "`levels check` exited " + std::to_string(rc));
    c.note("`levels check` exit 0");
  } else {
    c.note("CLI not given, `levels check` skipped");
  }
}

void midi(Check& c, const Tools& tools) {
  int files = 0;
  for (const Level& level : testing::stock_levels()) {
    const std::string name = "level " + std::to_string(level.id);
    const Building& b = level.demo_building;
    const MidiDocument doc = render_midi(b, level.playback.value_or(PlaybackOptions{}));
    const auto& bytes = doc.bytes;
    ++files;
    const std::vector<std::uint8_t> header = {'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0};
    c.expect(bytes.size() > header.size() && std::equal(header.begin(), header.end(), bytes.begin()),
             name + ": bad SMF header");
    const oracle::MidiFile f = oracle::read_midi(bytes);
    c.expect(f.error.empty(), name + ": reader says " + f.error);
    c.expect(f.format == 0 && f.tracks == 1 && f.division == 480 && f.ended, name + ": header fields");
    std::map<int, int> balance;
    int ons = 0, offs = 0;
    for (const auto& e : f.events) {
      if (oracle::is_note_on(e)) ++ons, ++balance[e.data[0]];
      if (oracle::is_note_off(e)) ++offs, --balance[e.data[0]];
    }
    const int surface = static_cast<int>(flatten(b).size());
    c.expect(ons == 3 * surface && offs == 3 * surface, name + ": " + std::to_string(ons) + " on / " +
                                                           std::to_string(offs) + " off for " +
                                                           std::to_string(surface) + " chords");
    for (const auto& [pitch, n] : balance) c.expect(n == 0, name + ": pitch " + std::to_string(pitch) + " unbalanced");
    c.expect(render_midi(b, level.playback.value_or(PlaybackOptions{})).bytes == bytes, name + ": not deterministic");
  }
  std::string mido = "mido skipped";
  if (!tools.python.empty() && !tools.scripts.empty() && run("\"" + tools.python + "\" -c \"import mido\"") == 0) {
    const fs::path out = fs::temp_directory_path() / "hblocks-acceptance-twinkle.mid";
    const auto& twinkle = testing::stock_levels()[2];
    const auto bytes = render_midi(twinkle.demo_building).bytes;
    std::ofstream(out, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                               static_cast<std::streamsize>(bytes.size()));
    const int rc = run("\"" + tools.python + "\" \"" + tools.scripts + "/midi_check.py\" \"" + out.string() + "\" " +
                       std::to_string(flatten(twinkle.demo_building).size()));
    c.expect(rc == 0, "mido check exited " + std::to_string(rc));
    mido = "mido reads Twinkle";
    fs::remove(out);
  }
  c.note(std::to_string(files) + " files, " + mido);
}

void puzzles(Check& c, const Tools&) {
  int brute = 0;
  long arrangements = 0;
  for (const Level& level : testing::stock_levels()) {
    const std::string name = "level " + std::to_string(level.id);
    const Building& b = level.demo_building;
    const Puzzle p = shuffle_puzzle(b, level.puzzle_seed);
    c.expect(p.blocks.size() <= 8, name + " has more than 8 blocks");

    std::vector<int> want;
    std::vector<BlockId> original;
    for (const auto& blk : b.base) want.push_back(degree_number(blk.degree)), original.push_back(blk.id);
    for (const auto& pr : b.prolongations)
      for (const auto& blk : pr.inner) want.push_back(degree_number(blk.degree)), original.push_back(blk.id);
    Arrangement identity;
    for (std::size_t s = 0; s < original.size(); ++s) identity[static_cast<int>(s)] = original[s];
    c.expect(check_reconstruction(p, identity).status == ReconstructionResult::Status::Complete,
             name + ": original arrangement not Complete");

    const int n = static_cast<int>(p.blocks.size());
    if (n > 5) continue;
    ++brute;
    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::function<void(int)> visit = [&](int slot) {
      if (slot == n) {
        ++arrangements;
        Arrangement arr;
        bool all_right = true;
        for (int s = 0; s < n; ++s) {
          const int bi = assign[static_cast<std::size_t>(s)];
          if (bi >= 0) arr[s] = p.blocks[static_cast<std::size_t>(bi)].id;
          all_right = all_right && bi >= 0 &&
                      degree_number(p.blocks[static_cast<std::size_t>(bi)].degree) == want[static_cast<std::size_t>(s)];
        }
        const bool complete = check_reconstruction(p, arr).status == ReconstructionResult::Status::Complete;
        c.expect(complete == all_right, name + ": accepts a wrong arrangement or rejects a right one");
        return;
      }
      assign[static_cast<std::size_t>(slot)] = -1;
      visit(slot + 1);
      for (int bi = 0; bi < n; ++bi) {
        if (used[static_cast<std::size_t>(bi)]) continue;
        used[static_cast<std::size_t>(bi)] = true;
        assign[static_cast<std::size_t>(slot)] = bi;
        visit(slot + 1);
        used[static_cast<std::size_t>(bi)] = false;
      }
    };
    visit(0);
  }
  c.expect(brute > 0, "no stock building small enough to brute-force");
  c.note(std::to_string(testing::stock_levels().size()) + " demos Complete, " + std::to_string(brute) +
         " brute-forced over " + std::to_string(arrangements) + " arrangements");
}

void flow(Check& c, const Tools& tools) {
  Engine engine(testing::stock_levels());
  const auto post = [&](const std::string& target, const Json& body) { return testing::call(engine, "POST", target, body); };
  post("/sessions", Json{{"id", "accept"}});
  const std::string actions = "/sessions/accept/actions";
  const auto code = [](const testing::ApiResult& r) {
    return r.body.contains("error") ? r.body.at("error").at("code").get<std::string>() : std::string("none");
  };
  // Illegal moves before anything is learned.
  c.expect(code(post(actions, {{"type", "start_level"}, {"level", 2}})) == "E_LOCKED_LEVEL", "level 2 not locked");
  c.expect(code(post(actions, {{"type", "enter_creation"}})) == "E_LOCKED_LEVEL", "creation not locked");
  c.expect(code(post(actions, {{"type", "next"}})) == "E_ILLEGAL_TRANSITION", "next from menu accepted");
  c.expect(code(post(actions, {{"type", "start_level"}, {"level", 1}, {"bogus", 1}})) == "E_SCHEMA",
           "unknown field accepted");

  const int done = testing::play_all_levels(engine, "accept");
  c.expect(done == 7, "completed " + std::to_string(done) + " of 7 levels");
  const Json s = testing::call(engine, "GET", "/sessions/accept").body;
  const Json learned = s.at("progress").at("learned_degrees");
  c.expect(learned == Json::array({"I", "ii", "iii", "IV", "V", "vi", "vii"}), "learned " + learned.dump());
  c.expect(s.at("palette").size() == 7, "palette has " + std::to_string(s.at("palette").size()) + " chords");
  c.expect(code(post(actions, {{"type", "next"}})) == "E_ILLEGAL_TRANSITION", "next after complete accepted");

  std::string cli = "CLI-only run skipped";
  if (!tools.cli.empty() && !tools.python.empty() && !tools.scripts.empty()) {
    const int rc = run("\"" + tools.python + "\" \"" + tools.scripts + "/cli_flow.py\" \"" + tools.cli + "\" \"" +
                       testing::stock_content().string() + "\"");
    c.expect(rc == 0, "CLI-only flow exited " + std::to_string(rc));
    cli = "CLI-only run ok";
  }
  c.note(std::to_string(done) + " levels via API, " + std::to_string(learned.size()) + " chords learned, " + cli);
}

void round_trip(Check& c, const Tools&) {
  int docs = 0;
  auto same = [&](const std::string& text, const std::function<Json(const Json&)>& cycle, const std::string& what) {
    ++docs;
    c.expect(canonical_dump(cycle(parse_document(text))) == text, what + " changed on round trip");
  };
  for (int id = 1; id <= 7; ++id) {
    const std::string text = read_text_file(level_file_path(testing::stock_content(), id));
    same(text, [](const Json& j) { return level_to_json(level_from_json(j)); }, "level" + std::to_string(id) + ".json");
    same(canonical_dump(parse_document(text).at("demo_building")),
         [](const Json& j) { return building_to_json(building_from_json(j)); }, "level " + std::to_string(id) + " building");
  }
  const Session rich = testing::rich_session();
  same(canonical_dump(session_to_json(rich)), [](const Json& j) { return session_to_json(session_from_json(j)); },
       "rich session");
  for (const auto& comp : rich.compositions)
    same(canonical_dump(composition_to_json(comp)),
         [](const Json& j) { return composition_to_json(composition_from_json(j)); }, "composition");

  // A session after a full playthrough, through the store and back.
  const fs::path dir = testing::scratch_dir("acceptance-store");
  {
    Engine engine(testing::stock_levels(), EngineOptions{dir, {}, kDefaultMaxSurfaceChords});
    testing::call(engine, "POST", "/sessions", Json{{"id", "played"}});
    testing::play_all_levels(engine, "played");
  }
  const SessionStore store(dir);
  const std::string played = canonical_dump(session_to_json(store.load("played")));
  same(played, [](const Json& j) { return session_to_json(session_from_json(j)); }, "played session");
  fs::remove_all(dir);
  c.note(std::to_string(docs) + " documents byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  Tools tools;
  CLI::App app{"Acceptance checks"};
  app.add_option("--cli", tools.cli, "hblocks executable");
  app.add_option("--python", tools.python, "Python interpreter with mido");
  app.add_option("--scripts", tools.scripts, "directory holding midi_check.py and cli_flow.py");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, void (*)(Check&, const Tools&)>> criteria = {
      {"compatibility oracle", compatibility}, {"grammar exhaustiveness", grammar},
      {"content validation", content},         {"MIDI correctness", midi},
      {"puzzle properties", puzzles},          {"flow integrity", flow},
      {"round-trip", round_trip},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c, tools);
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw: ") + e.what());
    }
    if (!c.passed()) ++failed;
    std::cout << (c.passed() ? "PASS " : "FAIL ") << name << " — " << c.summary() << "\n";
  }
  return failed == 0 ? 0 : 1;
}
