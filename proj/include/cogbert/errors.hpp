#pragma once

#include <stdexcept>
#include <string>

namespace cogbert {

// Base of every error thrown by the library. The CLI maps subclasses to
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// A sentence id (or other key) missing from a lookup table.
class LookupError : public Error {
 public:
  LookupError(const std::string& what, std::string key)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during optimization.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, long step)
      : NumericError(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace cogbert
