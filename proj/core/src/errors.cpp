#include "riscore/errors.hpp"

namespace riscore {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EndpointUnavailable: return "EndpointUnavailable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::RequestRejected: return "RequestRejected";
    case ErrorCode::ResponseTruncated: return "ResponseTruncated";
    case ErrorCode::UnknownModelTag: return "UnknownModelTag";
    case ErrorCode::ExemplarOverlap: return "ExemplarOverlap";
    case ErrorCode::Unparseable: return "Unparseable";
    case ErrorCode::InsufficientDistractors: return "InsufficientDistractors";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::MalformedIndexLine: return "MalformedIndexLine";
    case ErrorCode::MalformedDataRecord: return "MalformedDataRecord";
    case ErrorCode::DanglingPointer: return "DanglingPointer";
    case ErrorCode::TooFewDistractors: return "TooFewDistractors";
    case ErrorCode::DuplicateOption: return "DuplicateOption";
    case ErrorCode::MissingExplanation: return "MissingExplanation";
    case ErrorCode::ShotMismatch: return "ShotMismatch";
    case ErrorCode::OptionCountMismatch: return "OptionCountMismatch";
    case ErrorCode::PairingMismatch: return "PairingMismatch";
    case ErrorCode::IncompleteGroup: return "IncompleteGroup";
    case ErrorCode::UnknownRiddle: return "UnknownRiddle";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace riscore
