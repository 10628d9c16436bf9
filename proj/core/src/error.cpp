#include "melseg/error.hpp"

namespace melseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::NonIntegerField: return "NonIntegerField";
    case ErrorCode::NonMonotoneOnset: return "NonMonotoneOnset";
    case ErrorCode::OverlappingNotes: return "OverlappingNotes";
    case ErrorCode::EmptyMelody: return "EmptyMelody";
    case ErrorCode::FirstNoteNotPhraseStart: return "FirstNoteNotPhraseStart";
    case ErrorCode::InvalidNote: return "InvalidNote";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooLargeForEnumeration: return "TooLargeForEnumeration";
    case ErrorCode::EmptyFreeSet: return "EmptyFreeSet";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::NonPositiveProbability: return "NonPositiveProbability";
    case ErrorCode::NonPositiveBeta: return "NonPositiveBeta";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyBsp: return "EmptyBsp";
    case ErrorCode::EmptyKSet: return "EmptyKSet";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::FoldTooSmall: return "FoldTooSmall";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace melseg
