// hblocks: offline access to the engine (analysis, validation, rendering,
// content checks) plus the HTTP service.
//
// Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hblocks/audio.h"
#include "hblocks/content.h"
#include "hblocks/engine.h"
#include "hblocks/server.h"

using namespace hblocks;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ContentMissing:
    case ErrorCode::NotFound:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownDegree:
    case ErrorCode::UnknownKey:
    case ErrorCode::UnknownFunction:
    case ErrorCode::SequenceTooShort: return kExitUsage;
    default: return kExitInvalid;
  }
}

void print_error(const Error& e) {
  std::cerr << "error: " << error_code_name(e.code());
  if (e.index()) std::cerr << " at " << *e.index();
  std::cerr << ": " << e.what() << "\n";
}

Building read_building(const std::string& file) {
  Json doc = parse_document(read_text_file(file));
  // Compositions and API requests wrap the building.
  if (doc.is_object() && doc.contains("building") && !doc.contains("base")) doc = doc.at("building");
  return building_from_json(doc);
}

void print_report(const ValidationReport& r) {
  if (r.ok()) {
    std::cout << "valid\n";
    return;
  }
  for (const auto& v : r.violations)
    std::cout << error_code_name(v.code) << " [" << v.index << "] " << v.message << "\n";
  std::cout << r.violations.size() << " violation(s)\n";
}

int cmd_matrix(const std::string& key_name, bool as_json) {
  const Key key = parse_key(key_name);
  const auto m = compatibility_matrix(key);
  if (as_json) {
    std::cout << canonical_dump(matrix_to_json(key));
    return kExitOk;
  }
  int allowed = 0;
  std::cout << "from\\to";
  for (Degree b : kAllDegrees) std::cout << std::setw(5) << roman_label(b);
  std::cout << "\n";
  for (Degree a : kAllDegrees) {
    std::cout << std::setw(7) << roman_label(a);
    for (Degree b : kAllDegrees) {
      const bool ok = m[degree_number(a) - 1][degree_number(b) - 1];
      allowed += ok;
      std::cout << std::setw(5) << (ok ? "ok" : "--");
    }
    std::cout << "\n";
  }
  std::cout << "allowed " << allowed << ", forbidden " << 49 - allowed << "\n";
  return kExitOk;
}

int cmd_analyze(const std::vector<std::string>& tokens, const std::string& key_name, bool as_json) {
  std::vector<Degree> seq;
  for (const auto& tok : tokens) {
    // Accept both "I V I" as separate words and a single quoted string.
    std::istringstream in(tok);
    std::string word;
    while (in >> word) seq.push_back(parse_degree(word));
  }
  const ParseTree tree = parse_building(seq, parse_key(key_name));
  if (as_json) {
    std::cout << canonical_dump(parse_tree_to_json(tree));
    return kExitOk;
  }
  std::cout << describe(tree.root) << "\n";
  const auto blocks = tree.root.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i)
    std::cout << "  " << std::setw(3) << roman_label(blocks[i]->degree) << "  " << structure_name(tree.labels[i]) << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& file, bool as_json) {
  const ValidationReport r = validate_building(read_building(file));
  if (as_json)
    std::cout << canonical_dump(report_to_json(r));
  else
    print_report(r);
  return r.ok() ? kExitOk : kExitInvalid;
}

int cmd_render(const std::string& file, const std::string& out, PlaybackOptions opts) {
  const Building b = read_building(file);
  const ValidationReport r = validate_building(b);
  if (!r.ok()) {
    print_report(r);
    return kExitInvalid;
  }
  const MidiDocument midi = render_midi(b, opts);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + out);
  f.write(reinterpret_cast<const char*>(midi.bytes.data()), static_cast<std::streamsize>(midi.bytes.size()));
  if (!f) throw Error(ErrorCode::IoError, "write failed: " + out);
  std::cout << "wrote " << out << " (" << midi.bytes.size() << " bytes, " << flatten(b).size() << " chords)\n";
  return kExitOk;
}

int cmd_levels_check(const std::filesystem::path& dir) {
  const auto levels = level_sequence(dir);
  for (const auto& l : levels) {
    std::cout << "level " << l.id << "  " << std::setw(3) << roman_label(l.teaches) << "  "
              << describe(l.demo_building) << "  (" << l.demo_building.block_count() << " blocks)\n";
  }
  std::cout << "ok: " << levels.size() << " levels\n";
  return kExitOk;
}

HttpServer* g_server = nullptr;

int cmd_serve(const std::filesystem::path& content, const std::string& host, int port,
              const std::optional<std::string>& store) {
  EngineOptions opts;
  if (store) opts.store_dir = *store;
  Engine engine(level_sequence(content), opts);
  HttpServer server(engine);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "serving " << content.string() << " on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    g_server = nullptr;
    throw Error(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
  g_server = nullptr;
  return kExitOk;
}

int cmd_api(const std::filesystem::path& content, const std::optional<std::string>& store, const std::string& method,
            const std::string& target, const std::string& body) {
  EngineOptions opts;
  if (store) opts.store_dir = *store;
  Engine engine(level_sequence(content), opts);
  const ApiResponse r = engine.handle(method, target, body);
  if (r.content_type == "application/json")
    std::cout << Json::parse(r.body).dump(2) << "\n";
  else
    std::cout.write(r.body.data(), static_cast<std::streamsize>(r.body.size()));
  if (r.status < 300) return kExitOk;
  return r.status >= 500 || r.status == 404 ? kExitUsage : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmony blocks engine"};
  app.require_subcommand(1);

  std::optional<std::string> content_flag;
  std::string key = "C";
  bool as_json = false;

  auto* matrix = app.add_subcommand("matrix", "Print the 7x7 block compatibility table");
  matrix->add_option("--key", key, "Major key tonic");
  matrix->add_flag("--json", as_json);

  std::vector<std::string> seq;
  auto* analyze = app.add_subcommand("analyze", "Parse a degree sequence into a building");
  analyze->add_option("sequence", seq, "Roman degree labels, e.g. I IV I V I")->required();
  analyze->add_option("--key", key, "Major key tonic");
  analyze->add_flag("--json", as_json);

  std::string file;
  auto* validate = app.add_subcommand("validate", "Validate a building document");
  validate->add_option("file", file)->required();
  validate->add_flag("--json", as_json);

  std::string out;
  PlaybackOptions playback;
  auto* render = app.add_subcommand("render", "Render a building document to a MIDI file");
  render->add_option("file", file)->required();
  render->add_option("-o,--output", out)->required();
  render->add_option("--tempo", playback.tempo_bpm)->check(CLI::Range(kMinTempoBpm, kMaxTempoBpm));
  render->add_option("--beats", playback.chord_beats)->check(CLI::Range(1, 64));
  render->add_option("--velocity", playback.velocity)->check(CLI::Range(1, 127));

  auto* levels = app.add_subcommand("levels", "Level content tools");
  levels->require_subcommand(1);
  std::optional<std::string> levels_dir;
  auto* check = levels->add_subcommand("check", "Load and cross-validate level content");
  check->add_option("dir", levels_dir, "Content directory");

  int port = 8080;
  std::string host = "127.0.0.1";
  std::optional<std::string> store;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", host);
  serve->add_option("--content", content_flag, "Content directory (default: $HBLOCKS_CONTENT)");
  serve->add_option("--store", store, "Session store directory");

  std::string method, target, body;
  auto* api = app.add_subcommand("api", "Send one request to the engine without a server");
  api->add_option("method", method)->required()->check(CLI::IsMember({"GET", "POST"}));
  api->add_option("target", target)->required();
  api->add_option("body", body);
  api->add_option("--content", content_flag, "Content directory (default: $HBLOCKS_CONTENT)");
  api->add_option("--store", store, "Session store directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*matrix) return cmd_matrix(key, as_json);
    if (*analyze) return cmd_analyze(seq, key, as_json);
    if (*validate) return cmd_validate(file, as_json);
    if (*render) return cmd_render(file, out, playback);
    if (*check) return cmd_levels_check(resolve_content_dir(levels_dir, HBLOCKS_DEFAULT_CONTENT));
    if (*serve) return cmd_serve(resolve_content_dir(content_flag, HBLOCKS_DEFAULT_CONTENT), host, port, store);
    if (*api) return cmd_api(resolve_content_dir(content_flag, HBLOCKS_DEFAULT_CONTENT), store, method, target, body);
  } catch (const Error& e) {
    print_error(e);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
