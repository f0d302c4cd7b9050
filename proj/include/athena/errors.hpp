#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace athena {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// Syntax error in a formula or manual-fitness expression.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  /// 0-based character offset into the parsed text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed syntax with invalid meaning, e.g. an interval with a > b.
class SemanticError : public Error {
 public:
  using Error::Error;
};

class MissingChannel : public Error {
 public:
  explicit MissingChannel(const std::string& channel)
      : Error("missing channel '" + channel + "'"), channel_(channel) {}

  const std::string& channel() const noexcept { return channel_; }

 private:
  std::string channel_;
};

/// The trace is too short for the time instants a formula references.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class PortMismatch : public Error {
 public:
  using Error::Error;
};

class NumericalDivergence : public Error {
 public:
  explicit NumericalDivergence(double time)
      : Error("non-finite state at t=" + std::to_string(time)), time_(time) {}

  /// First simulation time at which the state was non-finite.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace athena
