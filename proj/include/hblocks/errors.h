#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hblocks {

enum class ErrorCode {
  InvalidArgument,
  UnknownDegree,
  UnknownKey,
  UnknownFunction,
  SequenceTooShort,
  InvalidTenon,
  InvalidMortise,
  EmptyBase,
  BaseBreak,
  BadNeighbor,
  BadPassing,
  AnchorConflict,
  AnchorOutOfRange,
  UnparseableSequence,
  UnknownBlock,
  UnknownSlot,
  SlotReuse,
  IncompatibleConnection,
  SlotOccupied,
  BlockNotDetached,
  ContentMissing,
  SchemaViolation,
  ChordNotYetTaught,
  IllegalTransition,
  PuzzleIncomplete,
  LockedLevel,
  ChordNotLearned,
  DetachedBlocks,
  ValidationFailed,
  CompositionTooLong,
  NotFound,
  CorruptState,
  IoError,
};

// Stable wire name, e.g. "E_INCOMPATIBLE".
std::string_view error_code_name(ErrorCode code);

// Every engine failure is an Error carrying a typed code and, where the
// failure is located in a sequence (base pair, anchor, level), its index.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<int> index = std::nullopt)
      : std::runtime_error(std::move(message)), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<int> index_;
};

}  // namespace hblocks
