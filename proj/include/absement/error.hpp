#pragma once

#include <stdexcept>
#include <string>

namespace absement {

/// Base of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with caller-supplied data, arguments or files. The CLI maps these
/// to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class FileNotFoundError : public InputError {
 public:
  using InputError::InputError;
};

class MalformedFileError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedFormatError : public InputError {
 public:
  using InputError::InputError;
};

class InvalidArgumentError : public InputError {
 public:
  using InputError::InputError;
};

/// Failures while computing or writing results (exit code 2).
class ProcessingError : public Error {
 public:
  using Error::Error;
};

}  // namespace absement
