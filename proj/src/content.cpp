#include "hblocks/content.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hblocks/errors.h"
#include "hblocks/serialize.h"

namespace hblocks {

std::filesystem::path level_file_path(const std::filesystem::path& content_dir, int level_id) {
  return content_dir / ("level" + std::to_string(level_id) + ".json");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Level> level_sequence(const std::filesystem::path& content_dir) {
  std::vector<Level> levels;
  for (int id = 1; id <= kLevelCount; ++id) {
    const auto path = level_file_path(content_dir, id);
    if (!std::filesystem::is_regular_file(path))
      throw Error(ErrorCode::ContentMissing, "missing level file " + path.string(), id);
    try {
      Level level = level_from_json(parse_document(read_text_file(path)));
      levels.push_back(std::move(level));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw Error(ErrorCode::ContentMissing, e.what(), id);
      throw Error(e.code() == ErrorCode::ChordNotYetTaught ? e.code() : ErrorCode::SchemaViolation,
                  path.filename().string() + ": " + e.what(), id);
    }
  }
  validate_levels(levels);
  return levels;
}

std::filesystem::path resolve_content_dir(const std::optional<std::string>& flag,
                                          const std::filesystem::path& fallback) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kContentEnvVar); env && *env) return env;
  return fallback;
}

}  // namespace hblocks
