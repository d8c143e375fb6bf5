#pragma once

#include <stdexcept>
#include <string>

namespace ccd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: non-finite scores, tau outside [0,1], bad sizes.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function (zero density,
/// quantile at p outside (0,1), degenerate distribution parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A multiplicative process reached zero and cannot continue in log domain.
class ProcessDiedError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccd
