#pragma once

#include <stdexcept>
#include <string>

namespace sigmak {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation on a locus where l(k), g(k) or the curvature formula blows up.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// d2alpha/dk2 requested where alpha = 0 or 2k - l = 0.
class UndefinedCurvatureError : public Error {
 public:
  using Error::Error;
};

/// Closed-form solution evaluated at (or beyond) a pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// First-integral evaluation outside the k-interval it was built for.
class RegionError : public Error {
 public:
  using Error::Error;
};

/// Operation requested for an orbit of the wrong kind.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// alpha^2 + k^2 = 0 where a leaf radius is needed.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Diagnostic requested on data that does not satisfy its precondition.
class InapplicableError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigmak
