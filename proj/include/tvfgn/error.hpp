#pragma once

#include <stdexcept>
#include <string>

namespace tvfgn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (non-monotone time, NaN, parse failures).
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Factorization failures, optimizer divergence and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvfgn
