#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hblocks/session.h"

namespace hblocks {

// One file per session: a canonical document holding the session payload and
// a CRC-32 of the payload's compact serialization.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  bool exists(std::string_view id) const;

  // Writes to a temporary file and renames it over the old one.
  void save(const Session& session) const;
  // Throws NotFound or CorruptState.
  Session load(std::string_view id) const;

  std::filesystem::path path_for(std::string_view id) const;

 private:
  std::filesystem::path dir_;
};

// Session ids are 1-64 characters of [A-Za-z0-9_-].
bool valid_session_id(std::string_view id);

std::string payload_checksum(std::string_view compact_payload);

}  // namespace hblocks
