#pragma once

#include <stdexcept>
#include <string>

namespace equipart {

/// Malformed or inconsistent input (files, dimensions, invalid parameters).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation only defined for a particular ambient dimension.
class UnsupportedDimension : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid search could not resolve the requested quantity at its resolution.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace equipart
