#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hblocks/block.h"
#include "hblocks/errors.h"
#include "hblocks/grammar.h"
#include "hblocks/layout.h"
#include "hblocks/learning.h"

namespace hblocks {

inline constexpr int kDefaultMaxSurfaceChords = 32;

struct PaletteEntry {
  Degree degree = Degree::I;
  BlockSymbol symbol;
  TenonProfile default_tenon;
  MortiseProfile default_mortise;
};

// Exactly the learned chords, in degree order.
std::vector<PaletteEntry> palette(const Progress& progress);

// Creation Mode opens once level 1 is complete.
bool creation_unlocked(const Progress& progress);

// Throws ChordNotLearned, InvalidTenon, InvalidMortise.
MusicalBlock assemble(const Progress& progress, Degree deg, std::optional<TenonProfile> tenon = std::nullopt,
                      std::optional<MortiseProfile> mortise = std::nullopt);

struct Composition {
  std::string name;
  Building building;
  std::int64_t created_at = 0;  // seconds since the Unix epoch
  std::string author_session;

  friend bool operator==(const Composition&, const Composition&) = default;
};

class DetachedBlocksError : public Error {
 public:
  explicit DetachedBlocksError(std::vector<BlockId> blocks);
  const std::vector<BlockId>& blocks() const { return blocks_; }

 private:
  std::vector<BlockId> blocks_;
};

class ValidationFailedError : public Error {
 public:
  explicit ValidationFailedError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct FinalizeOptions {
  std::int64_t created_at = 0;
  std::string author_session;
  int max_surface_chords = kDefaultMaxSurfaceChords;
};

// Succeeds only for a fully valid workspace with nothing left floating.
Composition finalize(const Workspace& ws, const std::string& name, const FinalizeOptions& options = {});

}  // namespace hblocks
