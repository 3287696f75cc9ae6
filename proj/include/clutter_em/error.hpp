#pragma once

#include <stdexcept>
#include <string>

namespace clutter {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape, dimension or symmetry violation of an input.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Factorization failure, non-positive-definite input, or similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A mixture class received (numerically) zero total responsibility.
class ClassCollapseError : public NumericalError {
 public:
  ClassCollapseError(int class_index, int iteration, const std::string& what)
      : NumericalError(what), class_index_(class_index), iteration_(iteration) {}

  /// 1-based class index.
  int class_index() const noexcept { return class_index_; }
  /// EM iteration at which the collapse happened, 0 when raised outside run_em.
  int iteration() const noexcept { return iteration_; }

 private:
  int class_index_;
  int iteration_;
};

/// Invalid configuration value; carries the JSON key path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : Error(key_path.empty() ? message : key_path + ": " + message),
        key_path_(std::move(key_path)),
        message_(message) {}

  const std::string& key_path() const noexcept { return key_path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string key_path_;
  std::string message_;
};

/// Malformed data file (range profile, label CSV).
class DataFormatError : public Error {
 public:
  DataFormatError(long line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  /// 1-based line number in the file, 0 when not tied to a line.
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace clutter
