#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace localgraph {

// Base for every error raised by the library. The CLI maps these to exit
// status 2 (data error); std::invalid_argument from CLI parsing maps to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Response or signal has no variance to explain.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class TooFewSamplesError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Ingestion failure; row/column are 1-based file coordinates, 0 when unknown.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(format(what, row, column)), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t row, std::size_t column) {
    if (row == 0 && column == 0) return what;
    return what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")";
  }
  std::size_t row_;
  std::size_t column_;
};

}  // namespace localgraph
