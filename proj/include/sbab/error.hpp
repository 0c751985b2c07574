#pragma once

#include <stdexcept>
#include <string>

namespace sbab {

// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Parse,         // malformed spec text or CLI argument
  Precondition,  // input outside an operation's domain
  Budget,        // a bounded search would exceed its configured budget
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable tag, e.g. "NonUnit" or "PreconditionViolated".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorKind::Parse, "ParseError",
              "at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline Error precondition_error(std::string code, const std::string& message) {
  return Error(ErrorKind::Precondition, std::move(code), message);
}

inline Error budget_error(const std::string& message) {
  return Error(ErrorKind::Budget, "BudgetExceeded", message);
}

}  // namespace sbab
