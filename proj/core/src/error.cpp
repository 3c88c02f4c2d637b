// SPDX-License-Identifier: Apache-2.0
#include "flucast/error.hpp"

namespace flucast {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::CorruptPayload: return "CorruptPayload";
    case ErrorCode::UnknownCountry: return "UnknownCountry";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::MissingDataInScope: return "MissingDataInScope";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::MissingFeatureColumn: return "MissingFeatureColumn";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::AllPointsSkipped: return "AllPointsSkipped";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DivergedTraining: return "DivergedTraining";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DivergedTraining:
    case ErrorCode::InsufficientData:
      return ErrorCategory::Training;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace flucast
