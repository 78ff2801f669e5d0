#pragma once

#include <stdexcept>
#include <string>

namespace padicaut {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input (CLI exit code 4).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Working precision ran out before a result could be certified (exit code 3).
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration, closure or search cap was exceeded (exit code 3).
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A computed certificate failed one of its checks (exit code 2).
class CertificateError : public Error {
 public:
  using Error::Error;
};

}  // namespace padicaut
