#pragma once

#include <stdexcept>
#include <string>

namespace tpde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched extents, lengths or widths between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A decomposition or estimate that has no well-defined answer
/// (all-zero spectrum, rank-deficient polar factor, vanishing branch weight).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples for the requested estimator.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Problem exceeds a dimension, memory or bond budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tpde
