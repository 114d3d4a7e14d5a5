#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anomattr {

// Base of every error raised by the library. The CLI maps subclasses to
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or usage (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

// A model query failed: external process death, malformed reply, timeout,
// or a dimension mismatch (exit code 4).
class ModelError : public Error {
 public:
  using Error::Error;
};

class QueryError : public ModelError {
 public:
  QueryError(std::size_t batch_index, const std::string& what)
      : ModelError("query " + std::to_string(batch_index) + ": " + what),
        batch_index_(batch_index) {}

  std::size_t batch_index() const noexcept { return batch_index_; }

 private:
  std::size_t batch_index_;
};

// The LC solver diverged or a result failed its convergence contract
// (exit code 5).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace anomattr
