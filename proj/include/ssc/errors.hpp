#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  kConfig = 2,
  kInput = 3,
  kDivergence = 4,
  kIo = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

struct DivergenceError : Error {
  DivergenceError(const std::string& what, long iteration)
      : Error(ErrorKind::kDivergence, what), iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace ssc
