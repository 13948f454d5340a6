#ifndef FAIRREC_ERROR_HPP
#define FAIRREC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fairrec {

// Every failure raised by the library derives from Error so callers can
// catch one type; the subclasses let the CLI map failures to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad range, bad shape).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An exhaustive routine was asked to run beyond its enumeration budget.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// The input graph lacks a structural property the routine relies on
// (typically connectivity).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Floating-point breakdown: NaN iterates, eigensolver failure, or an
// identity that must hold analytically came out violated.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// The feasible set of a combinatorial problem is empty.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string &message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace fairrec

#endif  // FAIRREC_ERROR_HPP
