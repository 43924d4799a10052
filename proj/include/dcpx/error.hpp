#pragma once

#include <stdexcept>
#include <string>

namespace dcpx {

enum class ErrorCode {
  UnsupportedShape,
  ShapeMismatch,
  ArityError,
  NonAffineProduct,
  NonFiniteValue,
  MissingBinding,
  SignViolation,
  NotDcp,
  NonAffineParameter,
  StatusMismatch,
  MixedSense,
  DimensionMismatch,
  IndexOutOfRange,
  InvalidSettings,
  DimensionCapExceeded,
  ParseError,
  UnknownAtom,
  UndeclaredIdentifier,
  ContractViolation,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dcpx
