#pragma once

#include <stdexcept>
#include <string>

namespace ascs {

// Process exit codes used by the command line tool. Every library error maps
// onto exactly one of these.
enum class ErrorCategory : int {
  config = 2,
  data = 3,
  solver = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

// Bad arguments or configuration supplied by the caller.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

// Input data that cannot be used: non-finite values, malformed lines,
// streams longer than declared.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

// A hyperparameter search with no admissible solution.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorCategory::solver, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace ascs
