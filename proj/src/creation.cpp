#include "hblocks/creation.h"

#include <string>

namespace hblocks {

namespace {

std::string join_ids(const std::vector<BlockId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ", " : "") + std::to_string(ids[i].value);
  return out;
}

}  // namespace

std::vector<PaletteEntry> palette(const Progress& progress) {
  std::vector<PaletteEntry> out;
  for (Degree d : progress.learned_degrees())
    out.push_back(PaletteEntry{d, symbol_for(d), default_tenon(d), default_mortise(d)});
  return out;
}

bool creation_unlocked(const Progress& progress) { return progress.is_completed(1); }

MusicalBlock assemble(const Progress& progress, Degree deg, std::optional<TenonProfile> tenon,
                      std::optional<MortiseProfile> mortise) {
  if (!progress.learned_degrees().count(deg))
    throw Error(ErrorCode::ChordNotLearned, std::string(roman_label(deg)) + " has not been learned yet");
  return make_block(deg, tenon, mortise);
}

DetachedBlocksError::DetachedBlocksError(std::vector<BlockId> blocks)
    : Error(ErrorCode::DetachedBlocks, "detached blocks remain: " + join_ids(blocks)), blocks_(std::move(blocks)) {}

ValidationFailedError::ValidationFailedError(ValidationReport report)
    : Error(ErrorCode::ValidationFailed,
            report.violations.empty() ? "validation failed" : report.violations.front().message),
      report_(std::move(report)) {}

Composition finalize(const Workspace& ws, const std::string& name, const FinalizeOptions& options) {
  if (auto floating = ws.detached(); !floating.empty()) throw DetachedBlocksError(std::move(floating));
  Building b = ws.to_building();
  ValidationReport report = validate_building(b);
  if (!report.ok()) throw ValidationFailedError(std::move(report));
  const auto surface = flatten(b);
  if (static_cast<int>(surface.size()) > options.max_surface_chords)
    throw Error(ErrorCode::CompositionTooLong, "composition has " + std::to_string(surface.size()) +
                                                   " chords; the limit is " +
                                                   std::to_string(options.max_surface_chords));
  renumber_blocks(b);
  return Composition{name, std::move(b), options.created_at, options.author_session};
}

}  // namespace hblocks
