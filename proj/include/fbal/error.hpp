#pragma once

#include <stdexcept>
#include <string>

namespace fbal {

enum class ErrorCode {
  DuplicateName,
  NegativeWeight,
  LengthMismatch,
  WeightViolation,
  UnknownElement,
  TargetMismatch,
  NonFiniteScalar,
  MissingAssignment,
  MissingGenerator,
  ContextMismatch,
  NormCertificationFailed,
  AlgebraMismatch,
  DimensionTooLarge,
  InvalidArgument,
  SyntaxError,
  UnknownIdentifier,
  BudgetExhausted,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::WeightViolation: return "WeightViolation";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::TargetMismatch: return "TargetMismatch";
    case ErrorCode::NonFiniteScalar: return "NonFiniteScalar";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::MissingGenerator: return "MissingGenerator";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::NormCertificationFailed: return "NormCertificationFailed";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
  }
  return "Unknown";
}

/// All library failures are reported through this exception. `subject()` names
/// the offending generator, atom or identifier when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace fbal
