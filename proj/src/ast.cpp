#include "sqlfix/ast.hpp"

#include <unordered_map>

#include "sqlfix/errors.hpp"

namespace sqlfix {

namespace {

constexpr const char* kKindNames[] = {
    "Query",        "SelectClause", "SelectItem",  "FromClause",
    "TableRef",     "Join",         "JoinCondition", "WhereClause",
    "GroupByClause", "HavingClause", "OrderByClause", "OrderItem",
    "LimitClause",  "SetOp",        "Subquery",    "CaseExpr",
    "WhenArm",      "FunctionCall", "BinaryOp",    "UnaryOp",
    "ColumnRef",    "Literal",      "Alias",       "Star",
    "InList",       "BetweenExpr",  "LikeExpr",    "IsNullExpr",
};

constexpr size_t kKindCount = sizeof(kKindNames) / sizeof(kKindNames[0]);

}  // namespace

const char* kind_name(NodeKind k) { return kKindNames[static_cast<size_t>(k)]; }

NodeKind kind_from_name(const std::string& name) {
  static const std::unordered_map<std::string, NodeKind> table = [] {
    std::unordered_map<std::string, NodeKind> m;
    for (size_t i = 0; i < kKindCount; ++i)
      m.emplace(kKindNames[i], static_cast<NodeKind>(i));
    return m;
  }();
  auto it = table.find(name);
  if (it == table.end()) throw Error("unknown node kind: " + name);
  return it->second;
}

static void assign_ids_rec(AstNode& n, int& next) {
  n.id = next++;
  for (AstNode& c : n.children) assign_ids_rec(c, next);
}

void assign_preorder_ids(AstNode& root) {
  int next = 0;
  assign_ids_rec(root, next);
}

static void collect_preorder(const AstNode& n, std::vector<const AstNode*>& out) {
  out.push_back(&n);
  for (const AstNode& c : n.children) collect_preorder(c, out);
}

std::vector<const AstNode*> traverse_dfs(const AstNode& root) {
  std::vector<const AstNode*> out;
  collect_preorder(root, out);
  return out;
}

std::vector<const AstNode*> traverse_dfs(const SqlAst& ast) {
  return traverse_dfs(ast.root);
}

bool structurally_equal(const AstNode& a, const AstNode& b) {
  if (a.kind != b.kind || a.value != b.value ||
      a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

bool structurally_equal(const SqlAst& a, const SqlAst& b) {
  return structurally_equal(a.root, b.root);
}

int node_count(const AstNode& root) {
  int n = 1;
  for (const AstNode& c : root.children) n += node_count(c);
  return n;
}

}  // namespace sqlfix
