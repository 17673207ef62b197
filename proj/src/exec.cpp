#include "sqlfix/exec.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "sqlfix/ast.hpp"
#include "sqlfix/errors.hpp"
#include "sqlfix/parse.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {

constexpr const char* kClassNames[] = {
    "Syntax",        "UnknownTable",   "UnknownColumn", "AmbiguousColumn",
    "AggregateMisuse", "TypeMismatch", "Other",
};

bool contains_ci(const std::string& haystack, const char* needle) {
  return to_lower_ascii(haystack).find(needle) != std::string::npos;
}

}  // namespace

const char* error_class_name(SqlErrorClass c) {
  return kClassNames[static_cast<size_t>(c)];
}

SqlErrorClass error_class_from_name(const std::string& name) {
  for (size_t i = 0; i < sizeof(kClassNames) / sizeof(kClassNames[0]); ++i)
    if (name == kClassNames[i]) return static_cast<SqlErrorClass>(i);
  throw Error("unknown error class: " + name);
}

SqlErrorClass classify_error(const std::string& raw) {
  if (contains_ci(raw, "no such table")) return SqlErrorClass::UnknownTable;
  if (contains_ci(raw, "no such column")) return SqlErrorClass::UnknownColumn;
  if (contains_ci(raw, "ambiguous column name"))
    return SqlErrorClass::AmbiguousColumn;
  if (contains_ci(raw, "misuse of aggregate") ||
      contains_ci(raw, "aggregate functions are not allowed") ||
      contains_ci(raw, "misuse of aliased aggregate"))
    return SqlErrorClass::AggregateMisuse;
  if (contains_ci(raw, "datatype mismatch")) return SqlErrorClass::TypeMismatch;
  if (contains_ci(raw, "syntax error") ||
      contains_ci(raw, "unrecognized token") ||
      contains_ci(raw, "incomplete input"))
    return SqlErrorClass::Syntax;
  return SqlErrorClass::Other;
}

ExecutionResult execute(const Database& db, const std::string& sql,
                        size_t row_cap) {
  if (db.handle() == nullptr) throw Error("execute on an invalid handle");

  ExecutionResult result;
  auto fail = [&](const std::string& raw) {
    result.columns.clear();
    result.rows.clear();
    result.error = SqlError{raw, classify_error(raw)};
    return result;
  };

  sqlite3_stmt* stmt = nullptr;
  int rc = sqlite3_prepare_v2(db.handle(), sql.c_str(), -1, &stmt, nullptr);
  if (rc != SQLITE_OK) return fail(sqlite3_errmsg(db.handle()));
  if (stmt == nullptr) return fail("empty statement");

  int ncols = sqlite3_column_count(stmt);
  for (int i = 0; i < ncols; ++i) {
    const char* name = sqlite3_column_name(stmt, i);
    result.columns.push_back(name != nullptr ? name : "");
  }

  while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    if (result.rows.size() >= row_cap) {
      sqlite3_finalize(stmt);
      return fail("row cap exceeded");
    }
    std::vector<Value> row;
    row.reserve(size_t(ncols));
    for (int i = 0; i < ncols; ++i) {
      switch (sqlite3_column_type(stmt, i)) {
        case SQLITE_NULL:
          row.emplace_back(std::monostate{});
          break;
        case SQLITE_INTEGER:
          row.emplace_back(int64_t(sqlite3_column_int64(stmt, i)));
          break;
        case SQLITE_FLOAT:
          row.emplace_back(sqlite3_column_double(stmt, i));
          break;
        default: {
          const unsigned char* text = sqlite3_column_text(stmt, i);
          row.emplace_back(std::string(
              text != nullptr ? reinterpret_cast<const char*>(text) : ""));
          break;
        }
      }
    }
    result.rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE) {
    std::string msg = sqlite3_errmsg(db.handle());
    sqlite3_finalize(stmt);
    return fail(msg);
  }
  sqlite3_finalize(stmt);
  return result;
}

std::optional<SqlError> extract_error(const ExecutionResult& result) {
  return result.error;
}

namespace {

enum class ValueRank { Null = 0, Numeric = 1, Text = 2 };

ValueRank rank_of(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return ValueRank::Null;
  if (std::holds_alternative<std::string>(v)) return ValueRank::Text;
  return ValueRank::Numeric;
}

double as_double(const Value& v) {
  if (std::holds_alternative<int64_t>(v)) return double(std::get<int64_t>(v));
  return std::get<double>(v);
}

// Exact ordering used to canonicalize row order before multiset comparison.
bool value_less(const Value& a, const Value& b) {
  ValueRank ra = rank_of(a), rb = rank_of(b);
  if (ra != rb) return ra < rb;
  switch (ra) {
    case ValueRank::Null:
      return false;
    case ValueRank::Numeric:
      return as_double(a) < as_double(b);
    case ValueRank::Text:
      return std::get<std::string>(a) < std::get<std::string>(b);
  }
  return false;
}

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (value_less(a[i], b[i])) return true;
    if (value_less(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

bool value_equal(const Value& pred, const Value& gold) {
  ValueRank rp = rank_of(pred), rg = rank_of(gold);
  if (rp != rg) return false;
  switch (rp) {
    case ValueRank::Null:
      return true;
    case ValueRank::Text:
      return std::get<std::string>(pred) == std::get<std::string>(gold);
    case ValueRank::Numeric: {
      if (std::holds_alternative<int64_t>(pred) &&
          std::holds_alternative<int64_t>(gold))
        return std::get<int64_t>(pred) == std::get<int64_t>(gold);
      double a = as_double(pred), b = as_double(gold);
      return std::fabs(a - b) <= 1e-6 * std::max(1.0, std::fabs(b));
    }
  }
  return false;
}

bool rows_equal(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!value_equal(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool compare_results(const ExecutionResult& pred, const ExecutionResult& gold,
                     bool ordered) {
  if (pred.error.has_value() || gold.error.has_value())
    throw ContractViolation("compare_results called with an errored side");
  if (pred.columns.size() != gold.columns.size()) return false;
  if (pred.rows.size() != gold.rows.size()) return false;

  if (ordered) {
    for (size_t i = 0; i < pred.rows.size(); ++i)
      if (!rows_equal(pred.rows[i], gold.rows[i])) return false;
    return true;
  }

  std::vector<const std::vector<Value>*> ps, gs;
  for (const auto& r : pred.rows) ps.push_back(&r);
  for (const auto& r : gold.rows) gs.push_back(&r);
  auto by_row = [](const std::vector<Value>* a, const std::vector<Value>* b) {
    return row_less(*a, *b);
  };
  std::sort(ps.begin(), ps.end(), by_row);
  std::sort(gs.begin(), gs.end(), by_row);
  for (size_t i = 0; i < ps.size(); ++i)
    if (!rows_equal(*ps[i], *gs[i])) return false;
  return true;
}

bool golden_is_ordered(const std::string& golden_sql) {
  try {
    SqlAst ast = parse_sql(golden_sql);
    for (const AstNode* n : traverse_dfs(ast))
      if (n->kind == NodeKind::OrderByClause) return true;
    return false;
  } catch (const ParseError&) {
    return to_lower_ascii(golden_sql).find("order by") != std::string::npos;
  }
}

}  // namespace sqlfix
