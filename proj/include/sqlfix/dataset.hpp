#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sqlfix/db.hpp"

namespace sqlfix {

struct DatasetRecord {
  std::string id;
  std::string nlq;
  std::string schema_ddl;  // DDL/seed statements defining the record's database
  std::string golden_sql;
  std::string split = "train";  // train|test
};

struct FilterReport {
  size_t kept = 0;
  size_t dropped_db_creation = 0;
  size_t dropped_golden_error = 0;
  size_t dropped_golden_empty = 0;
  std::vector<std::pair<std::string, std::string>> dropped_ids;  // (id, reason)

  std::string to_json() const;
};

// Loads a JSON-lines dataset. Field aliases: nlq <- "sql_prompt",
// schema_ddl <- "sql_context", golden_sql <- "sql". Unknown fields are
// ignored. Throws IoError, or SchemaError naming the first offending line
// and missing field.
std::vector<DatasetRecord> load_dataset(const std::string& path);

// Writes records back out as JSON-lines with canonical field names.
void save_dataset(const std::vector<DatasetRecord>& records,
                  const std::string& path);

Database provision_database(const DatasetRecord& record);

// Keeps a record iff its database provisions, the golden SQL executes
// without error, and the golden result has at least one row. Failures
// become report entries in that priority order.
std::pair<std::vector<DatasetRecord>, FilterReport> filter_records(
    const std::vector<DatasetRecord>& records);

}  // namespace sqlfix
