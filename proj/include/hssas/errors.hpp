#pragma once

#include <stdexcept>
#include <string>

namespace hssas {

/// Bad input data: malformed files, label/shape mismatches in loaded artifacts.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent command-line or config usage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated internal contract (shape mismatch between tensors, non-finite math).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DimensionError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

}  // namespace hssas
