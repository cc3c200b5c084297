#include "hblocks/errors.h"

namespace hblocks {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::UnknownDegree: return "E_UNKNOWN_DEGREE";
    case ErrorCode::UnknownKey: return "E_UNKNOWN_KEY";
    case ErrorCode::UnknownFunction: return "E_UNKNOWN_FUNCTION";
    case ErrorCode::SequenceTooShort: return "E_SEQUENCE_TOO_SHORT";
    case ErrorCode::InvalidTenon: return "E_INVALID_TENON";
    case ErrorCode::InvalidMortise: return "E_INVALID_MORTISE";
    case ErrorCode::EmptyBase: return "E_EMPTY_BASE";
    case ErrorCode::BaseBreak: return "E_BASE_BREAK";
    case ErrorCode::BadNeighbor: return "E_BAD_NEIGHBOR";
    case ErrorCode::BadPassing: return "E_BAD_PASSING";
    case ErrorCode::AnchorConflict: return "E_ANCHOR_CONFLICT";
    case ErrorCode::AnchorOutOfRange: return "E_ANCHOR_OUT_OF_RANGE";
    case ErrorCode::UnparseableSequence: return "E_UNPARSEABLE";
    case ErrorCode::UnknownBlock: return "E_UNKNOWN_BLOCK";
    case ErrorCode::UnknownSlot: return "E_UNKNOWN_SLOT";
    case ErrorCode::SlotReuse: return "E_SLOT_REUSE";
    case ErrorCode::IncompatibleConnection: return "E_INCOMPATIBLE";
    case ErrorCode::SlotOccupied: return "E_SLOT_OCCUPIED";
    case ErrorCode::BlockNotDetached: return "E_BLOCK_NOT_DETACHED";
    case ErrorCode::ContentMissing: return "E_CONTENT_MISSING";
    case ErrorCode::SchemaViolation: return "E_SCHEMA";
    case ErrorCode::ChordNotYetTaught: return "E_CHORD_NOT_YET_TAUGHT";
    case ErrorCode::IllegalTransition: return "E_ILLEGAL_TRANSITION";
    case ErrorCode::PuzzleIncomplete: return "E_PUZZLE_INCOMPLETE";
    case ErrorCode::LockedLevel: return "E_LOCKED_LEVEL";
    case ErrorCode::ChordNotLearned: return "E_CHORD_NOT_LEARNED";
    case ErrorCode::DetachedBlocks: return "E_DETACHED_BLOCKS";
    case ErrorCode::ValidationFailed: return "E_VALIDATION_FAILED";
    case ErrorCode::CompositionTooLong: return "E_COMPOSITION_TOO_LONG";
    case ErrorCode::NotFound: return "E_NOT_FOUND";
    case ErrorCode::CorruptState: return "E_CORRUPT_STATE";
    case ErrorCode::IoError: return "E_IO";
  }
  return "E_UNKNOWN";
}

}  // namespace hblocks
