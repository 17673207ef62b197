#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqlfix/db.hpp"

namespace sqlfix {

// null / integer / float / text
using Value = std::variant<std::monostate, int64_t, double, std::string>;

enum class SqlErrorClass {
  Syntax,
  UnknownTable,
  UnknownColumn,
  AmbiguousColumn,
  AggregateMisuse,
  TypeMismatch,
  Other,
};

const char* error_class_name(SqlErrorClass c);
SqlErrorClass error_class_from_name(const std::string& name);

// Deterministic mapping from an engine message to an error class; anything
// unrecognized lands in Other with the raw text preserved.
SqlErrorClass classify_error(const std::string& raw_message);

struct SqlError {
  std::string raw_message;
  SqlErrorClass error_class = SqlErrorClass::Other;
};

struct ExecutionResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  std::optional<SqlError> error;

  bool ok() const { return !error.has_value(); }
};

inline constexpr size_t kDefaultRowCap = 100000;

// Runs one SQL statement and materializes the full result. SQL-level
// failures are captured in the result, never thrown; only an invalid handle
// raises. Results larger than row_cap become an Other-class error.
ExecutionResult execute(const Database& db, const std::string& sql,
                        size_t row_cap = kDefaultRowCap);

std::optional<SqlError> extract_error(const ExecutionResult& result);

// Execution-accuracy comparison: column counts equal and rows equal, as
// sequences when ordered, else as multisets. Ints, text and nulls compare
// exactly; floats within 1e-6 relative tolerance. Column names are ignored.
// Throws ContractViolation when either side carries an error.
bool compare_results(const ExecutionResult& pred, const ExecutionResult& gold,
                     bool ordered);

// True when the golden query imposes a row order (has ORDER BY).
bool golden_is_ordered(const std::string& golden_sql);

}  // namespace sqlfix
