#pragma once

#include <stdexcept>
#include <string>

namespace dcovsel {

// Error categories double as process exit codes for the command-line tool.
enum class ErrorKind : int {
  usage = 2,
  data = 3,
  size_guard = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

/// Violated precondition on an argument (bad index, empty set, bad exponent).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Malformed or degenerate input data, including stages that select too few features.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Exhaustive enumeration requested beyond its hard size limit.
class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(ErrorKind::size_guard, what) {}
};

}  // namespace dcovsel
