#pragma once

#include <string>

struct sqlite3;

namespace sqlfix {

// Owning handle to one SQLite database. A handle is confined to one thread
// at a time; distinct handles may be used in parallel.
class Database {
 public:
  Database();  // fresh in-memory database
  explicit Database(const std::string& path);
  ~Database();

  Database(Database&& other) noexcept;
  Database& operator=(Database&& other) noexcept;
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  sqlite3* handle() const { return db_; }

 private:
  sqlite3* db_ = nullptr;
};

// Executes the DDL/seed statements of a schema script in order against a
// fresh in-memory database. Throws DbCreationError carrying the index of the
// failing statement and the engine message.
Database provision_database(const std::string& schema_ddl);

}  // namespace sqlfix
