#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hblocks/learning.h"
#include "hblocks/serialize.h"
#include "hblocks/session.h"
#include "hblocks/store.h"

namespace hblocks {

struct EngineOptions {
  std::optional<std::filesystem::path> store_dir;
  HintConfig hints;
  int max_surface_chords = kDefaultMaxSurfaceChords;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// {"ok": false, "error": {"code", "message", "index"?, "details"?}}
Json error_body(const Error& e, const Json& details = nullptr);
int http_status_for(ErrorCode code);

// {"labels", "matrix": 7x7 bools, "allowed", "forbidden"}
Json matrix_to_json(const Key& key);

// A rejected action, with whatever structured detail the failure produced
// (violation report, detached block ids, reconstruction result).
class ActionError : public Error {
 public:
  ActionError(const Error& e, Json details) : Error(e), details_(std::move(details)) {}
  const Json& details() const { return details_; }

 private:
  Json details_;
};

// Owns the level content and all live sessions. Every public call is safe to
// use from concurrent request threads; actions on one session apply in
// arrival order.
class Engine {
 public:
  explicit Engine(std::vector<Level> levels, EngineOptions options = {});
  ~Engine();

  const std::vector<Level>& levels() const { return levels_; }

  Json list_levels() const;
  Json matrix(const Key& key = c_major()) const;
  Json analyze(const Json& request) const;
  Json validate(const Json& building_doc) const;
  std::vector<std::uint8_t> render(const Json& request) const;

  Json create_session(std::optional<std::string> id = std::nullopt);
  Json get_session(const std::string& id);
  // Applies one action. Errors are logged to the session stream, persisted,
  // and rethrown.
  Json post_action(const std::string& id, const Json& action);

  // Events with seq > since. If none are ready, waits up to `wait`.
  std::vector<SessionEvent> events_since(const std::string& id, std::uint64_t since,
                                         std::chrono::milliseconds wait = std::chrono::milliseconds(0));

  // Routes one request; `target` may carry a query string.
  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body);

  // Wakes all stream waiters; later waits return immediately.
  void shutdown();
  bool is_shut_down() const { return shutdown_.load(); }

 private:
  struct Slot {
    std::mutex mu;
    std::condition_variable cv;
    Session session;
  };

  std::shared_ptr<Slot> find_slot(const std::string& id);
  Json apply(Session& s, const Json& action, double time);
  Json session_view(const Session& s) const;
  Json level_view(const Level& level) const;
  void persist(const Session& s) const;

  std::vector<Level> levels_;
  EngineOptions options_;
  std::optional<SessionStore> store_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_session_ = 1;
  std::atomic<bool> shutdown_{false};
};

Json event_to_json(const SessionEvent& e);

}  // namespace hblocks
