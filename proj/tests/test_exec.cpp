#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqlfix/db.hpp"
#include "sqlfix/errors.hpp"
#include "sqlfix/exec.hpp"

using namespace sqlfix;

namespace {

Database small_db() {
  return provision_database(
      "CREATE TABLE t(a INTEGER, b TEXT);"
      "INSERT INTO t VALUES (1, 'x');"
      "INSERT INTO t VALUES (2, 'y');"
      "INSERT INTO t VALUES (3, 'y');");
}

ExecutionResult make_result(std::vector<std::string> cols,
                            std::vector<std::vector<Value>> rows) {
  ExecutionResult r;
  r.columns = std::move(cols);
  r.rows = std::move(rows);
  return r;
}

}  // namespace

TEST_CASE("select one") {
  Database db;
  ExecutionResult r = execute(db, "SELECT 1");
  REQUIRE(r.ok());
  REQUIRE(r.columns.size() == 1);
  CHECK(r.columns[0] == "1");
  REQUIRE(r.rows.size() == 1);
  CHECK(std::get<int64_t>(r.rows[0][0]) == 1);
}

TEST_CASE("provisioning runs statements in order") {
  Database db = provision_database(
      "CREATE TABLE t(a INT); INSERT INTO t VALUES(1);");
  ExecutionResult r = execute(db, "SELECT a FROM t");
  REQUIRE(r.ok());
  CHECK(r.rows.size() == 1);

  try {
    provision_database("CREATE TABLE t(a INT; ");
    FAIL("expected DbCreationError");
  } catch (const DbCreationError& e) {
    CHECK(e.statement_index == 0);
  }

  // A statement referencing a table created later fails at its own index.
  try {
    provision_database("INSERT INTO t VALUES (1); CREATE TABLE t(a INT);");
    FAIL("expected DbCreationError");
  } catch (const DbCreationError& e) {
    CHECK(e.statement_index == 0);
  }

  // Empty schema is a valid empty database.
  Database empty = provision_database("");
  CHECK(execute(empty, "SELECT 1").ok());
}

TEST_CASE("error capture and classification") {
  Database db = small_db();

  ExecutionResult missing = execute(db, "SELECT x FROM missing");
  REQUIRE(missing.error.has_value());
  CHECK(missing.error->error_class == SqlErrorClass::UnknownTable);
  CHECK(missing.columns.empty());
  CHECK(missing.rows.empty());

  ExecutionResult badcol = execute(db, "SELECT nope FROM t");
  REQUIRE(badcol.error.has_value());
  CHECK(badcol.error->error_class == SqlErrorClass::UnknownColumn);
  CHECK(badcol.error->raw_message.find("no such column") != std::string::npos);

  ExecutionResult syntax = execute(db, "SELEC a FROM t");
  REQUIRE(syntax.error.has_value());
  CHECK(syntax.error->error_class == SqlErrorClass::Syntax);

  ExecutionResult agg = execute(db, "SELECT a FROM t WHERE COUNT(*) > 1");
  REQUIRE(agg.error.has_value());
  CHECK(agg.error->error_class == SqlErrorClass::AggregateMisuse);

  Database joined = provision_database(
      "CREATE TABLE l(id INT, v INT); CREATE TABLE r(id INT, v INT);"
      "INSERT INTO l VALUES (1, 2); INSERT INTO r VALUES (1, 3);");
  ExecutionResult ambiguous =
      execute(joined, "SELECT id FROM l JOIN r ON l.v = r.v");
  REQUIRE(ambiguous.error.has_value());
  CHECK(ambiguous.error->error_class == SqlErrorClass::AmbiguousColumn);

  CHECK(classify_error("no such column: foo") == SqlErrorClass::UnknownColumn);
  CHECK(classify_error("datatype mismatch") == SqlErrorClass::TypeMismatch);
  CHECK(classify_error("completely novel engine complaint") ==
        SqlErrorClass::Other);
}

TEST_CASE("extract_error passes errors through and stays silent on success") {
  Database db = small_db();
  CHECK_FALSE(extract_error(execute(db, "SELECT a FROM t")).has_value());

  // Wrong-but-successful results carry no error.
  CHECK_FALSE(extract_error(execute(db, "SELECT b FROM t")).has_value());

  auto err = extract_error(execute(db, "SELECT zzz FROM t"));
  REQUIRE(err.has_value());
  CHECK(err->error_class == SqlErrorClass::UnknownColumn);

  ExecutionResult other;
  other.error = SqlError{"weird message", classify_error("weird message")};
  CHECK(extract_error(other)->raw_message == "weird message");
  CHECK(extract_error(other)->error_class == SqlErrorClass::Other);
}

TEST_CASE("row cap becomes an Other-class error") {
  Database db = small_db();
  ExecutionResult capped = execute(db, "SELECT a FROM t", 2);
  REQUIRE(capped.error.has_value());
  CHECK(capped.error->error_class == SqlErrorClass::Other);
  CHECK(capped.error->raw_message == "row cap exceeded");
}

TEST_CASE("read queries do not mutate the database") {
  Database db = small_db();
  ExecutionResult first = execute(db, "SELECT a, b FROM t");
  ExecutionResult second = execute(db, "SELECT a, b FROM t");
  REQUIRE(first.ok());
  CHECK(compare_results(first, second, true));
}

TEST_CASE("compare_results definition") {
  ExecutionResult a = make_result({"c1"}, {{Value(int64_t(1))}, {Value(int64_t(2))}});
  ExecutionResult b = make_result({"other_name"}, {{Value(int64_t(1))}, {Value(int64_t(2))}});
  CHECK(compare_results(a, b, true));   // column names ignored
  CHECK(compare_results(a, b, false));

  ExecutionResult permuted =
      make_result({"c"}, {{Value(int64_t(2))}, {Value(int64_t(1))}});
  CHECK(compare_results(a, permuted, false));
  CHECK_FALSE(compare_results(a, permuted, true));

  ExecutionResult fewer = make_result({"c"}, {{Value(int64_t(1))}});
  CHECK_FALSE(compare_results(a, fewer, false));

  ExecutionResult wide = make_result({"c", "d"}, {{Value(int64_t(1)), Value(int64_t(2))}});
  CHECK_FALSE(compare_results(a, wide, false));

  // Float tolerance: 0.3333333 vs 1/3 within 1e-6 relative.
  ExecutionResult approx = make_result({"f"}, {{Value(0.3333333)}});
  ExecutionResult third = make_result({"f"}, {{Value(1.0 / 3.0)}});
  CHECK(compare_results(approx, third, true));

  ExecutionResult off = make_result({"f"}, {{Value(0.3343)}});
  CHECK_FALSE(compare_results(off, third, true));

  // Ints and floats compare numerically across storage classes.
  ExecutionResult as_int = make_result({"n"}, {{Value(int64_t(1))}});
  ExecutionResult as_float = make_result({"n"}, {{Value(1.0)}});
  CHECK(compare_results(as_int, as_float, true));

  // Nulls equal nulls, nothing else.
  ExecutionResult with_null = make_result({"n"}, {{Value(std::monostate{})}});
  CHECK(compare_results(with_null, with_null, true));
  CHECK_FALSE(compare_results(with_null, as_int, true));

  ExecutionResult errored;
  errored.error = SqlError{"boom", SqlErrorClass::Other};
  CHECK_THROWS_AS(compare_results(errored, a, false), ContractViolation);
  CHECK_THROWS_AS(compare_results(a, errored, false), ContractViolation);
}

TEST_CASE("compare_results is reflexive and symmetric in unordered mode") {
  Database db = small_db();
  ExecutionResult r1 = execute(db, "SELECT a, b FROM t");
  ExecutionResult r2 = execute(db, "SELECT a, b FROM t ORDER BY a DESC");
  CHECK(compare_results(r1, r1, false));
  CHECK(compare_results(r2, r2, false));
  CHECK(compare_results(r1, r2, false) == compare_results(r2, r1, false));
  CHECK(compare_results(r1, r2, false));
}

TEST_CASE("golden_is_ordered") {
  CHECK(golden_is_ordered("SELECT a FROM t ORDER BY a"));
  CHECK_FALSE(golden_is_ordered("SELECT a FROM t"));
  // Unsupported syntax falls back to a text scan.
  CHECK(golden_is_ordered("SELECT a FROM t WINDOW w AS (ORDER BY a)"));
}

TEST_CASE("no-group-by aggregate is pinned to engine behavior") {
  // The reference engine accepts an ungrouped mixed select and returns one row.
  Database db = small_db();
  ExecutionResult r = execute(db, "SELECT a, COUNT(*) FROM t");
  REQUIRE(r.ok());
  CHECK(r.rows.size() == 1);
  CHECK(std::get<int64_t>(r.rows[0][1]) == 3);
}
