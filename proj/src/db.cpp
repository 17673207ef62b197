#include "sqlfix/db.hpp"

#include <sqlite3.h>

#include "sqlfix/errors.hpp"

namespace sqlfix {

Database::Database() {
  if (sqlite3_open(":memory:", &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw IoError("cannot open in-memory database: " + msg);
  }
}

Database::Database(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw IoError("cannot open database " + path + ": " + msg);
  }
}

Database::~Database() {
  if (db_ != nullptr) sqlite3_close(db_);
}

Database::Database(Database&& other) noexcept : db_(other.db_) {
  other.db_ = nullptr;
}

Database& Database::operator=(Database&& other) noexcept {
  if (this != &other) {
    if (db_ != nullptr) sqlite3_close(db_);
    db_ = other.db_;
    other.db_ = nullptr;
  }
  return *this;
}

Database provision_database(const std::string& schema_ddl) {
  Database db;
  const char* cursor = schema_ddl.c_str();
  size_t index = 0;
  while (cursor != nullptr && *cursor != '\0') {
    sqlite3_stmt* stmt = nullptr;
    const char* tail = nullptr;
    int rc = sqlite3_prepare_v2(db.handle(), cursor, -1, &stmt, &tail);
    if (rc != SQLITE_OK) {
      std::string msg = sqlite3_errmsg(db.handle());
      throw DbCreationError(index, "statement " + std::to_string(index) +
                                       ": " + msg);
    }
    if (stmt == nullptr) break;  // trailing whitespace or comment
    rc = sqlite3_step(stmt);
    while (rc == SQLITE_ROW) rc = sqlite3_step(stmt);  // DDL may yield rows
    if (rc != SQLITE_DONE) {
      std::string msg = sqlite3_errmsg(db.handle());
      sqlite3_finalize(stmt);
      throw DbCreationError(index, "statement " + std::to_string(index) +
                                       ": " + msg);
    }
    sqlite3_finalize(stmt);
    cursor = tail;
    ++index;
  }
  return db;
}

}  // namespace sqlfix
