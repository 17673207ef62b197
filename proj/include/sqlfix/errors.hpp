#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqlfix {

// Recoverable failures are exceptions derived from Error; pipeline stages
// that must not abort a batch (pool build, correction) catch Error and
// record the failure instead of propagating it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
 public:
  ParseError(size_t offset, std::string expected, const std::string& msg)
      : Error(msg), offset(offset), expected(std::move(expected)) {}
  size_t offset;        // byte offset into the input text
  std::string expected; // what the parser was looking for
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(size_t line, std::string field, const std::string& msg)
      : Error(msg), line(line), field(std::move(field)) {}
  size_t line;       // 1-based line number of the first offending record
  std::string field; // missing or malformed field name
};

class DbCreationError : public Error {
 public:
  DbCreationError(size_t statement_index, const std::string& msg)
      : Error(msg), statement_index(statement_index) {}
  size_t statement_index; // 0-based index of the failing DDL statement
};

class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidPosition : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class LlmUnavailable : public Error {
 public:
  using Error::Error;
};

class ExtractionFailed : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class MissingRecord : public Error {
 public:
  using Error::Error;
};

}  // namespace sqlfix
