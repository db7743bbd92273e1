#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dyngame {

enum class ErrorKind {
  SyntaxError,
  SemanticError,
  ValidationError,
  NonStochasticKernel,
  PerfectRecallViolation,
  RewardOutOfRange,
  SupportTooLarge,
  DomainMiss,
  NotAnInformationState,
  NotMSIWitness,
  NotUSIWitness,
  NoConvergence,
  TooLargeForEnumeration,
  BadParameter,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// One problem found by a validator. t is 1-based stage, -1 when not tied to a stage.
struct Violation {
  ErrorKind kind;
  int t = -1;
  std::string where;
  std::string message;
};

class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Parser diagnostics keep the source position.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace dyngame
