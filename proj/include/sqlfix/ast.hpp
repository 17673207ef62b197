#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqlfix {

// Closed set of node kinds covering the supported SQL subset.
enum class NodeKind : uint8_t {
  Query,
  SelectClause,
  SelectItem,
  FromClause,
  TableRef,
  Join,
  JoinCondition,
  WhereClause,
  GroupByClause,
  HavingClause,
  OrderByClause,
  OrderItem,
  LimitClause,
  SetOp,
  Subquery,
  CaseExpr,
  WhenArm,
  FunctionCall,
  BinaryOp,
  UnaryOp,
  ColumnRef,
  Literal,
  Alias,
  Star,
  InList,
  BetweenExpr,
  LikeExpr,
  IsNullExpr,
};

const char* kind_name(NodeKind k);
NodeKind kind_from_name(const std::string& name);  // throws Error on unknown names

// Labeled ordered tree node. value carries identifier text, literal lexemes
// (string literals with quotes stripped), operator symbols, or keyword
// markers such as DISTINCT / join types / ASC / DESC.
struct AstNode {
  int id = -1;
  NodeKind kind = NodeKind::Query;
  std::string value;
  std::vector<AstNode> children;

  bool is_leaf() const { return children.empty(); }
};

// Parsed SQL statement; root is a Query or SetOp node.
struct SqlAst {
  AstNode root;
  std::string source;
};

// Assigns ids in depth-first pre-order starting at 0.
void assign_preorder_ids(AstNode& root);

// Pre-order node sequence. Pointers are valid while the tree is alive.
std::vector<const AstNode*> traverse_dfs(const SqlAst& ast);
std::vector<const AstNode*> traverse_dfs(const AstNode& root);

// Structural equality: kind, value and child structure; ids are ignored.
bool structurally_equal(const AstNode& a, const AstNode& b);
bool structurally_equal(const SqlAst& a, const SqlAst& b);

int node_count(const AstNode& root);

}  // namespace sqlfix
