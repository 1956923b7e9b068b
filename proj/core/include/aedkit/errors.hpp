#pragma once

#include <stdexcept>
#include <string>

namespace aed {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix/vector shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Parameters that violate a documented precondition (bad rank, bad key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data that is structurally valid but unusable (all-zero input, too few frames).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed files: WAV chunks, annotation lines, containers, manifests.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace aed
