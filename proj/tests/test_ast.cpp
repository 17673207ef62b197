#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqlfix/ast.hpp"
#include "sqlfix/errors.hpp"
#include "sqlfix/parse.hpp"
#include "sqlfix/render.hpp"

#include "query_fuzzer.hpp"

using namespace sqlfix;

TEST_CASE("minimal query structure") {
  SqlAst ast = parse_sql("SELECT 1");
  const AstNode& q = ast.root;
  REQUIRE(q.kind == NodeKind::Query);
  REQUIRE(q.children.size() == 1);
  const AstNode& select = q.children[0];
  CHECK(select.kind == NodeKind::SelectClause);
  REQUIRE(select.children.size() == 1);
  const AstNode& item = select.children[0];
  CHECK(item.kind == NodeKind::SelectItem);
  REQUIRE(item.children.size() == 1);
  CHECK(item.children[0].kind == NodeKind::Literal);
  CHECK(item.children[0].value == "1");
}

TEST_CASE("where clause parse tree") {
  // Hand-drawn tree: WhereClause -> BinaryOp("=") -> [ColumnRef(x), Literal(1)]
  SqlAst ast = parse_sql("SELECT a FROM t WHERE x = 1");
  REQUIRE(ast.root.children.size() == 3);
  const AstNode& where = ast.root.children[2];
  REQUIRE(where.kind == NodeKind::WhereClause);
  REQUIRE(where.children.size() == 1);
  const AstNode& cmp = where.children[0];
  CHECK(cmp.kind == NodeKind::BinaryOp);
  CHECK(cmp.value == "=");
  REQUIRE(cmp.children.size() == 2);
  CHECK(cmp.children[0].kind == NodeKind::ColumnRef);
  CHECK(cmp.children[0].value == "x");
  CHECK(cmp.children[1].kind == NodeKind::Literal);
  CHECK(cmp.children[1].value == "1");
}

TEST_CASE("malformed input reports byte offset") {
  try {
    parse_sql("SELECT FROM");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 7);
    CHECK(e.expected == "expression");
  }

  CHECK_THROWS_AS(parse_sql(""), ParseError);
  CHECK_THROWS_AS(parse_sql("   "), ParseError);
  CHECK_THROWS_AS(parse_sql("SELECT 'unterminated"), ParseError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t WHERE"), ParseError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t trailing junk ?"), ParseError);
  CHECK_THROWS_AS(parse_sql("CREATE TABLE t(a INT)"), ParseError);
}

TEST_CASE("render canonicalizes whitespace and keyword case") {
  CHECK(render_sql(parse_sql("select  a from t")) == "SELECT a FROM t");
  CHECK(render_sql(parse_sql("select a,b   from t where x=1 and y<2")) ==
        "SELECT a, b FROM t WHERE x = 1 AND y < 2");
  CHECK(render_sql(parse_sql("SELECT a FROM t ORDER BY a ASC")) ==
        "SELECT a FROM t ORDER BY a");
  CHECK(render_sql(parse_sql("select count(*) from t")) ==
        "SELECT COUNT(*) FROM t");
  CHECK(render_sql(parse_sql("SELECT a FROM t x")) == "SELECT a FROM t AS x");
  CHECK(render_sql(parse_sql("SELECT a != b FROM t")) == "SELECT a <> b FROM t");
}

TEST_CASE("render round trip is stable") {
  const char* queries[] = {
      "SELECT a FROM t ORDER BY a DESC LIMIT 5",
      "SELECT DISTINCT city FROM customers",
      "SELECT a, b AS total FROM t WHERE x = 1 OR y IS NOT NULL",
      "SELECT COUNT(DISTINCT name) FROM users GROUP BY city HAVING COUNT(*) > 2",
      "SELECT u.name, o.total FROM users AS u JOIN orders AS o ON u.id = o.uid",
      "SELECT a FROM t LEFT JOIN s ON t.id = s.id WHERE a BETWEEN 1 AND 5",
      "SELECT a FROM t CROSS JOIN s LIMIT 10 OFFSET 2",
      "SELECT name FROM t WHERE name LIKE '%ab%' AND id IN (1, 2, 3)",
      "SELECT a FROM t WHERE id IN (SELECT id FROM s WHERE x = 1)",
      "SELECT CASE WHEN a > 1 THEN 'hi' ELSE 'lo' END FROM t",
      "SELECT CASE status WHEN 'a' THEN 1 ELSE 0 END FROM t",
      "SELECT a FROM t UNION ALL SELECT b FROM s",
      "SELECT a FROM t UNION SELECT b FROM s UNION ALL SELECT c FROM r",
      "SELECT (a + b) * c FROM t",
      "SELECT a + (b + c) FROM t",
      "SELECT a - (b - c) FROM t",
      "SELECT -(a + b) FROM t",
      "SELECT NOT a = b FROM t",
      "SELECT 'O''Brien' FROM t",
      "SELECT t.* FROM t",
      "SELECT * FROM (SELECT a FROM t) AS sub WHERE a > 1",
      "SELECT a || 'x' FROM t",
      "SELECT a FROM t WHERE NOT x IN (1, 2)",
  };
  for (const char* q : queries) {
    CAPTURE(q);
    SqlAst first = parse_sql(q);
    std::string rendered = render_sql(first);
    SqlAst second = parse_sql(rendered);
    CHECK(structurally_equal(first, second));
    // Canonical text is a fixed point.
    CHECK(render_sql(second) == rendered);
  }
  CHECK(render_sql(parse_sql("SELECT a FROM t ORDER BY a DESC LIMIT 5")) ==
        "SELECT a FROM t ORDER BY a DESC LIMIT 5");
}

TEST_CASE("traverse_dfs yields pre-order with increasing ids") {
  SqlAst ast = parse_sql("SELECT 1");
  auto nodes = traverse_dfs(ast);
  REQUIRE(nodes.size() == 4);
  CHECK(nodes[0]->kind == NodeKind::Query);
  CHECK(nodes[1]->kind == NodeKind::SelectClause);
  CHECK(nodes[2]->kind == NodeKind::SelectItem);
  CHECK(nodes[3]->kind == NodeKind::Literal);
  for (size_t i = 0; i < nodes.size(); ++i) CHECK(nodes[i]->id == int(i));
}

TEST_CASE("select items traverse left to right") {
  SqlAst ast = parse_sql("SELECT a, b FROM t");
  auto nodes = traverse_dfs(ast);
  int pos_a = -1, pos_b = -1;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i]->kind == NodeKind::ColumnRef && nodes[i]->value == "a")
      pos_a = int(i);
    if (nodes[i]->kind == NodeKind::ColumnRef && nodes[i]->value == "b")
      pos_b = int(i);
  }
  REQUIRE(pos_a >= 0);
  REQUIRE(pos_b >= 0);
  CHECK(pos_a < pos_b);
}

TEST_CASE("parsing is deterministic") {
  SqlAst a = parse_sql("SELECT a, COUNT(*) FROM t GROUP BY a");
  SqlAst b = parse_sql("SELECT a, COUNT(*) FROM t GROUP BY a");
  CHECK(structurally_equal(a, b));
  auto na = traverse_dfs(a), nb = traverse_dfs(b);
  REQUIRE(na.size() == nb.size());
  for (size_t i = 0; i < na.size(); ++i) CHECK(na[i]->id == nb[i]->id);
}

static void check_preorder_ids(const AstNode& n) {
  int last_child_id = n.id;
  for (const AstNode& c : n.children) {
    CHECK(n.id < c.id);
    CHECK(last_child_id < c.id);  // sibling ids increase left to right
    check_preorder_ids(c);
    last_child_id = c.id;
  }
}

TEST_CASE("fuzzed queries: round trip and id properties") {
  sqlfix::testing::QueryFuzzer fuzzer(20240817);
  for (int i = 0; i < 200; ++i) {
    std::string text = fuzzer.random_query_text();
    CAPTURE(text);
    SqlAst ast = parse_sql(text);
    check_preorder_ids(ast.root);

    std::string rendered = render_sql(ast);
    SqlAst again = parse_sql(rendered);
    CHECK(structurally_equal(ast, again));
    CHECK(render_sql(again) == rendered);
  }
}
