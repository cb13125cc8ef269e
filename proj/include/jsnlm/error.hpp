#pragma once

#include <stdexcept>
#include <string>

namespace jsnlm {

// Malformed file content (bad PGM header, truncated payload).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures: missing file, unwritable path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument outside its valid domain (alpha <= 0, block too small, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Incomplete or inconsistent configuration (unknown key, missing scheme parameter).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jsnlm
