#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hblocks/learning.h"

namespace hblocks {

// Environment variable naming the content root when no flag is given.
inline constexpr const char* kContentEnvVar = "HBLOCKS_CONTENT";

std::filesystem::path level_file_path(const std::filesystem::path& content_dir, int level_id);

// Loads level1.json ... level7.json and cross-validates them. Throws
// ContentMissing, SchemaViolation, ChordNotYetTaught.
std::vector<Level> level_sequence(const std::filesystem::path& content_dir);

// Flag value if set, else the environment variable, else `fallback`.
std::filesystem::path resolve_content_dir(const std::optional<std::string>& flag,
                                          const std::filesystem::path& fallback);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace hblocks
