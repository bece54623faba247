#pragma once

#include <stdexcept>
#include <string>

namespace levikit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite-difference stencil does not fit inside the grid.
class StencilError : public Error {
  using Error::Error;
};

/// A point, circle or slice leaves the domain of a field.
class DomainError : public Error {
  using Error::Error;
};

/// Invalid construction or operation parameters.
class ParameterError : public Error {
  using Error::Error;
};

/// Grid too coarse for the requested operation.
class ResolutionError : public Error {
  using Error::Error;
};

/// Two routes that must agree did not.
class ConsistencyError : public Error {
  using Error::Error;
};

/// Gradient of a defining function vanishes at the evaluation point.
class DegeneratePointError : public Error {
  using Error::Error;
};

/// Input violates the hypothesis of a certificate.
class HypothesisError : public Error {
  using Error::Error;
};

/// A construction failed its own verification.
class ConstructionError : public Error {
  using Error::Error;
};

/// A flux cell has atoms on (or too close to) its boundary.
class AmbiguousCellError : public Error {
  using Error::Error;
};

}  // namespace levikit
