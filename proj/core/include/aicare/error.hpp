#pragma once

#include <stdexcept>
#include <string>

namespace aicare {

/// Base of all library errors that carry a user-facing message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, records, schemas).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message names the file and row.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t row, const std::string& what)
      : DataError(source + ":" + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// A referenced entity (patient, feature, visit) does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace aicare
