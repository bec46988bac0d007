#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace riskscope {

// Base of every error thrown by the library. The message can be prefixed
// with context (a measure tag, a member index) while it propagates.
class Error : public std::exception {
 public:
  explicit Error(std::string message) : message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }

  void add_context(const std::string& context) {
    message_ = context + ": " + message_;
  }

 private:
  std::string message_;
};

// A distribution failed its type invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad argument to an operation (a > b, n = 0, level outside (0,1), ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// The measure is not defined on this input (e.g. strict conditional ES with
// zero exceedance probability, or a level below a tail's confidence level).
class UndefinedMeasureError : public Error {
 public:
  using Error::Error;
};

// Constraint set cannot be met by the requested construction.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Synthesis produced fewer verified distinct members than requested.
class CannotReachKError : public Error {
 public:
  CannotReachKError(std::string message, std::size_t found)
      : Error(std::move(message)), found_(found) {}

  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t found_;
};

// Malformed JSON document or measure-spec string.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskscope
