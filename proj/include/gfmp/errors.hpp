#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfmp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  /// Short machine-readable tag, e.g. "parse" or "not_pd".
  virtual const char* kind() const noexcept { return "error"; }
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

private:
  std::size_t line_;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

class IoError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

class NotNormalized : public Error {
public:
  NotNormalized() : Error("model must have unit diagonal; call normalize() first") {}
  const char* kind() const noexcept override { return "not_normalized"; }
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_pd"; }
};

class NotAForest : public Error {
public:
  explicit NotAForest(std::vector<std::size_t> cycle);
  const std::vector<std::size_t>& cycle() const noexcept { return cycle_; }
  const char* kind() const noexcept override { return "not_a_forest"; }

private:
  std::vector<std::size_t> cycle_;
};

class FeedbackIndefinite : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "feedback_indefinite"; }
};

}  // namespace gfmp
