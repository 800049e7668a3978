#pragma once

#include <stdexcept>
#include <cstdint>
#include <string>

namespace rrcov {

// Every failure the library reports derives from Error; the kind drives the
// CLI exit code.
enum class ErrorKind {
  Parse,
  Validation,
  UnsupportedOrder,
  UnsupportedDimension,
  NotPositiveDefinite,
  InvalidInput,
  Resource,
  InternalConsistency,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  // line is 1-based; 0 when the location is unknown.
  ParseError(const std::string& what, int line = 0)
      : Error(ErrorKind::Parse,
              line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& what, double t0)
      : Error(ErrorKind::NotPositiveDefinite, what), t0_(t0) {}

  double t0() const noexcept { return t0_; }

 private:
  double t0_;
};

class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::uint64_t block)
      : Error(ErrorKind::Resource, what), block_(block) {}

  std::uint64_t block() const noexcept { return block_; }

 private:
  std::uint64_t block_;
};

}  // namespace rrcov
