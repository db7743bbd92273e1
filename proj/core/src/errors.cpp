#include "dyngame/errors.hpp"

namespace dyngame {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NonStochasticKernel: return "NonStochasticKernel";
    case ErrorKind::PerfectRecallViolation: return "PerfectRecallViolation";
    case ErrorKind::RewardOutOfRange: return "RewardOutOfRange";
    case ErrorKind::SupportTooLarge: return "SupportTooLarge";
    case ErrorKind::DomainMiss: return "DomainMiss";
    case ErrorKind::NotAnInformationState: return "NotAnInformationState";
    case ErrorKind::NotMSIWitness: return "NotMSIWitness";
    case ErrorKind::NotUSIWitness: return "NotUSIWitness";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TooLargeForEnumeration: return "TooLargeForEnumeration";
    case ErrorKind::BadParameter: return "BadParameter";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

static std::string summarize(const std::vector<Violation>& v) {
  std::string s = std::to_string(v.size()) + " violation(s)";
  if (!v.empty()) s += "; first: " + std::string(to_string(v.front().kind)) + " at " + v.front().where + ": " + v.front().message;
  return s;
}

static ErrorKind first_kind(const std::vector<Violation>& v) {
  return v.empty() ? ErrorKind::ValidationError : v.front().kind;
}

ValidationFailure::ValidationFailure(std::vector<Violation> violations)
    : Error(first_kind(violations), summarize(violations)), violations_(std::move(violations)) {}

ParseError::ParseError(ErrorKind kind, int line, int column, const std::string& message)
    : Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace dyngame
