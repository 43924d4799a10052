#include "dcpx/error.hpp"

namespace dcpx {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::NonAffineProduct: return "NonAffineProduct";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::NotDcp: return "NotDcp";
    case ErrorCode::NonAffineParameter: return "NonAffineParameter";
    case ErrorCode::StatusMismatch: return "StatusMismatch";
    case ErrorCode::MixedSense: return "MixedSense";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidSettings: return "InvalidSettings";
    case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownAtom: return "UnknownAtom";
    case ErrorCode::UndeclaredIdentifier: return "UndeclaredIdentifier";
    case ErrorCode::ContractViolation: return "ContractViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace dcpx
