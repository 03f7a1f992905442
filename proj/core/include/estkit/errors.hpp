#pragma once

#include <stdexcept>
#include <string>

namespace estkit {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad construction arguments: unknown kind, unknown parameter, type
// mismatch, out-of-domain hyper-parameter value.
class ParamError : public Error {
 public:
  using Error::Error;
};

// Shape mismatches, malformed input files, non-finite values.
class DataError : public Error {
 public:
  using Error::Error;
};

// The estimator does not expose the requested method.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class NotFittedError : public Error {
 public:
  using Error::Error;
};

// Degenerate training problems (single class, degenerate kernel, ...).
class FitError : public Error {
 public:
  using Error::Error;
};

// Model archive integrity or compatibility failures.
class ArchiveError : public Error {
 public:
  using Error::Error;
};

}  // namespace estkit
