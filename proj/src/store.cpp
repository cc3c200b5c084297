#include "hblocks/store.h"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hblocks/content.h"
#include "hblocks/errors.h"
#include "hblocks/serialize.h"

namespace hblocks {

bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string payload_checksum(std::string_view compact_payload) {
  const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(compact_payload.data()),
                          static_cast<uInt>(compact_payload.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create session store " + dir_.string() + ": " + ec.message());
}

std::filesystem::path SessionStore::path_for(std::string_view id) const {
  if (!valid_session_id(id)) throw Error(ErrorCode::InvalidArgument, "invalid session id '" + std::string(id) + "'");
  return dir_ / (std::string(id) + ".json");
}

bool SessionStore::exists(std::string_view id) const {
  return valid_session_id(id) && std::filesystem::is_regular_file(path_for(id));
}

void SessionStore::save(const Session& session) const {
  const auto path = path_for(session.id);
  const Json payload = session_to_json(session);
  const Json doc{{"schema_version", kSchemaVersion},
                 {"checksum", payload_checksum(payload.dump())},
                 {"payload", payload}};
  const std::string text = canonical_dump(doc);

  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot replace " + path.string());
  }
}

Session SessionStore::load(std::string_view id) const {
  const auto path = path_for(id);
  if (!std::filesystem::is_regular_file(path))
    throw Error(ErrorCode::NotFound, "no saved session '" + std::string(id) + "'");
  const std::string text = read_text_file(path);
  try {
    const Json doc = parse_document(text);
    check_fields(doc, "session file", {"schema_version", "checksum", "payload"});
    if (doc.at("schema_version") != kSchemaVersion) throw Error(ErrorCode::CorruptState, "unsupported schema_version");
    const Json& payload = doc.at("payload");
    if (!doc.at("checksum").is_string() || doc.at("checksum").get<std::string>() != payload_checksum(payload.dump()))
      throw Error(ErrorCode::CorruptState, "checksum mismatch");
    Session s = session_from_json(payload);
    if (s.id != id) throw Error(ErrorCode::CorruptState, "session id does not match its file name");
    return s;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptState) throw;
    throw Error(ErrorCode::CorruptState, "corrupt session '" + std::string(id) + "': " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptState, "corrupt session '" + std::string(id) + "': " + e.what());
  }
}

}  // namespace hblocks
