#pragma once

#include <stdexcept>
#include <string>

namespace greenchain {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system level problems. The CLI maps these to exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

class MissingFile : public IoError {
 public:
  explicit MissingFile(const std::string& path)
      : IoError("missing file: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class SchemaViolation : public Error {
 public:
  using Error::Error;
};

class CrossRefError : public Error {
 public:
  using Error::Error;
};

class UnitError : public Error {
 public:
  using Error::Error;
};

class InvalidPairing : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateSite : public Error {
 public:
  using Error::Error;
};

class DemandExceedsSupply : public Error {
 public:
  using Error::Error;
};

class NoFeasibleOption : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

/// Inputs produced from a different scenario than the one being run.
class ScenarioMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace greenchain
