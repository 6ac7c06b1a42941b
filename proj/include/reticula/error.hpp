#pragma once

#include <stdexcept>
#include <string>

namespace reticula {

/// Base class for every recoverable failure raised by the library
/// (bad input files, inconsistent manifests, invalid parameters).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace reticula
