#ifndef CARNOT_ERRORS_HPP
#define CARNOT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carnot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; offset() is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the domain of an expression (division by zero, log of
/// a non-positive number, missing coordinate, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (wrong class, bad ranks, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A size cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: singular matrix, rank jump, eigenvalue collision.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace carnot

#endif
