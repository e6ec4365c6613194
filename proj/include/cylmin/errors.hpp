#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cylmin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field (or the image of a field under a dilation / translation) does
/// not fit inside the truncated computational domain.
class SupportOverflow : public Error {
 public:
  using Error::Error;
};

/// One violated invariant, addressed by its `section.key` path.
struct Violation {
  std::string path;
  std::string message;
};

/// Well-formed input whose values violate one or more invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(format(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string format(const std::vector<Violation>& vs) {
    std::string out = "validation failed:";
    for (const auto& v : vs) out += "\n  " + v.path + ": " + v.message;
    return out;
  }

  std::vector<Violation> violations_;
};

/// Malformed configuration text (syntax, not values).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cylmin
