#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flexverif {

/// Position in a source text, 1-based. line == 0 means "unknown".
struct SourcePos {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Lexical or grammatical error, including name-resolution problems
/// (duplicate declarations, undeclared identifiers, non-local assignments).
class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, const std::string& message)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) +
              ": " + message),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Runtime expression evaluation failure (type error, unbound name, ...).
class EvalError : public Error {
 public:
  EvalError(SourcePos pos, const std::string& message)
      : Error(pos.line > 0 ? std::to_string(pos.line) + ":" +
                                 std::to_string(pos.column) + ": " + message
                           : message),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

class ElaborationError : public Error {
 public:
  using Error::Error;
};

class ProbabilitySumError : public ElaborationError {
 public:
  using ElaborationError::ElaborationError;
};

class UpdateOutOfRange : public ElaborationError {
 public:
  using ElaborationError::ElaborationError;
};

class ConflictingAssignment : public ElaborationError {
 public:
  using ElaborationError::ElaborationError;
};

class DeadlockAfterRestriction : public Error {
 public:
  DeadlockAfterRestriction(std::string what, std::vector<int> states)
      : Error(std::move(what)), states_(std::move(states)) {}
  const std::vector<int>& states() const { return states_; }

 private:
  std::vector<int> states_;
};

class QuerySyntaxError : public Error {
 public:
  using Error::Error;
};

class UnknownLabel : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(std::string what, double residual, long iterations)
      : Error(std::move(what)), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// Reachable-mode membership evaluation without a restricted model.
class MissingMdp : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

}  // namespace flexverif
