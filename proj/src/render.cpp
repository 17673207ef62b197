#include "sqlfix/render.hpp"

#include <cctype>
#include <sstream>

#include "sqlfix/errors.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {

// Higher binds tighter. Non-expression nodes report the top precedence so
// they are never parenthesized by the expression logic.
int precedence(const AstNode& n) {
  switch (n.kind) {
    case NodeKind::BinaryOp:
      if (n.value == "OR") return 1;
      if (n.value == "AND") return 2;
      if (n.value == "=" || n.value == "<>" || n.value == "<" ||
          n.value == "<=" || n.value == ">" || n.value == ">=")
        return 4;
      if (n.value == "+" || n.value == "-") return 5;
      if (n.value == "*" || n.value == "/" || n.value == "%") return 6;
      if (n.value == "||") return 7;
      return 4;
    case NodeKind::UnaryOp:
      return n.value == "NOT" ? 3 : 8;
    case NodeKind::InList:
    case NodeKind::BetweenExpr:
    case NodeKind::LikeExpr:
    case NodeKind::IsNullExpr:
      return 4;
    default:
      return 9;
  }
}

bool is_bare_literal(const std::string& v) {
  if (v == "NULL" || v == "TRUE" || v == "FALSE") return true;
  if (v.empty()) return false;
  size_t i = 0;
  bool digits = false;
  while (i < v.size() && std::isdigit(static_cast<unsigned char>(v[i]))) {
    ++i;
    digits = true;
  }
  if (i < v.size() && v[i] == '.') {
    ++i;
    while (i < v.size() && std::isdigit(static_cast<unsigned char>(v[i]))) {
      ++i;
      digits = true;
    }
  }
  if (!digits) return false;
  if (i < v.size() && (v[i] == 'e' || v[i] == 'E')) {
    ++i;
    if (i < v.size() && (v[i] == '+' || v[i] == '-')) ++i;
    if (i >= v.size()) return false;
    while (i < v.size() && std::isdigit(static_cast<unsigned char>(v[i]))) ++i;
  }
  return i == v.size();
}

std::string quote_string(const std::string& v) {
  std::string out = "'";
  for (char c : v) {
    if (c == '\'') out += "''";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

class Renderer {
 public:
  std::string render(const AstNode& root) {
    out_.str("");
    node(root);
    return out_.str();
  }

 private:
  void node(const AstNode& n) {
    switch (n.kind) {
      case NodeKind::Query: return query(n);
      case NodeKind::SetOp: return setop(n);
      default: return expr(n, 0);
    }
  }

  void query(const AstNode& q) {
    bool first = true;
    for (const AstNode& c : q.children) {
      if (!first) out_ << ' ';
      first = false;
      switch (c.kind) {
        case NodeKind::SelectClause: select_clause(c); break;
        case NodeKind::FromClause: from_clause(c); break;
        case NodeKind::WhereClause:
          out_ << "WHERE ";
          expr(c.children.at(0), 0);
          break;
        case NodeKind::GroupByClause:
          out_ << "GROUP BY ";
          expr_list(c.children);
          break;
        case NodeKind::HavingClause:
          out_ << "HAVING ";
          expr(c.children.at(0), 0);
          break;
        case NodeKind::OrderByClause: order_clause(c); break;
        case NodeKind::LimitClause: limit_clause(c); break;
        default:
          throw Error(std::string("unexpected node under Query: ") +
                      kind_name(c.kind));
      }
    }
  }

  void setop(const AstNode& s) {
    const AstNode& l = s.children.at(0);
    const AstNode& r = s.children.at(1);
    node(l);
    out_ << ' ' << (s.value.empty() ? "UNION" : s.value) << ' ';
    // Right-nested set operations need parentheses to keep left associativity.
    if (r.kind == NodeKind::SetOp) {
      out_ << '(';
      node(r);
      out_ << ')';
    } else {
      node(r);
    }
  }

  void select_clause(const AstNode& c) {
    out_ << "SELECT ";
    if (c.value == "DISTINCT") out_ << "DISTINCT ";
    bool first = true;
    for (const AstNode& item : c.children) {
      if (!first) out_ << ", ";
      first = false;
      select_item(item);
    }
  }

  void select_item(const AstNode& item) {
    const AstNode& e = item.children.at(0);
    expr(e, 0);
    if (item.children.size() > 1 &&
        item.children.back().kind == NodeKind::Alias)
      out_ << " AS " << item.children.back().value;
  }

  void from_clause(const AstNode& f) {
    out_ << "FROM ";
    bool first = true;
    for (const AstNode& c : f.children) {
      if (c.kind == NodeKind::Join) {
        join(c);
        continue;
      }
      if (!first) out_ << ", ";
      first = false;
      table_item(c);
    }
  }

  void table_item(const AstNode& t) {
    if (t.kind == NodeKind::TableRef) {
      out_ << t.value;
      if (!t.children.empty() && t.children.back().kind == NodeKind::Alias)
        out_ << " AS " << t.children.back().value;
      return;
    }
    if (t.kind == NodeKind::Subquery) {
      out_ << '(';
      node(t.children.at(0));
      out_ << ')';
      if (t.children.size() > 1 && t.children.back().kind == NodeKind::Alias)
        out_ << " AS " << t.children.back().value;
      return;
    }
    throw Error(std::string("unexpected FROM item: ") + kind_name(t.kind));
  }

  void join(const AstNode& j) {
    out_ << ' ';
    if (j.value == "INNER" || j.value.empty())
      out_ << "JOIN ";
    else
      out_ << j.value << " JOIN ";
    table_item(j.children.at(0));
    if (j.children.size() > 1 &&
        j.children.back().kind == NodeKind::JoinCondition) {
      out_ << " ON ";
      expr(j.children.back().children.at(0), 0);
    }
  }

  void order_clause(const AstNode& o) {
    out_ << "ORDER BY ";
    bool first = true;
    for (const AstNode& item : o.children) {
      if (!first) out_ << ", ";
      first = false;
      expr(item.children.at(0), 0);
      if (item.value == "DESC") out_ << " DESC";
    }
  }

  void limit_clause(const AstNode& l) {
    out_ << "LIMIT ";
    expr(l.children.at(0), 0);
    if (l.children.size() > 1) {
      out_ << " OFFSET ";
      expr(l.children.at(1), 0);
    }
  }

  void expr_list(const std::vector<AstNode>& nodes) {
    bool first = true;
    for (const AstNode& n : nodes) {
      if (!first) out_ << ", ";
      first = false;
      expr(n, 0);
    }
  }

  // min_prec: parenthesize when this node binds looser than the context
  // requires. right_of_same marks the right operand of an equal-precedence
  // left-associative operator.
  void expr(const AstNode& n, int min_prec, bool right_of_same = false) {
    int p = precedence(n);
    bool parens = p < min_prec || (right_of_same && p == min_prec);
    if (parens) out_ << '(';
    expr_inner(n, p);
    if (parens) out_ << ')';
  }

  void expr_inner(const AstNode& n, int p) {
    switch (n.kind) {
      case NodeKind::Literal:
        out_ << (is_bare_literal(n.value) ? n.value : quote_string(n.value));
        return;
      case NodeKind::ColumnRef:
      case NodeKind::Star:
        out_ << n.value;
        return;
      case NodeKind::BinaryOp:
        expr(n.children.at(0), p);
        out_ << ' ' << n.value << ' ';
        expr(n.children.at(1), p, /*right_of_same=*/true);
        return;
      case NodeKind::UnaryOp:
        if (n.value == "NOT" || n.value == "DISTINCT") {
          out_ << n.value << ' ';
          expr(n.children.at(0), p);
        } else {
          out_ << n.value;
          expr(n.children.at(0), p + 1);
        }
        return;
      case NodeKind::InList: {
        expr(n.children.at(0), 5);
        out_ << ' ' << (n.value.empty() ? "IN" : n.value) << " (";
        if (n.children.size() == 2 &&
            n.children[1].kind == NodeKind::Subquery) {
          node(n.children[1].children.at(0));
        } else {
          bool first = true;
          for (size_t i = 1; i < n.children.size(); ++i) {
            if (!first) out_ << ", ";
            first = false;
            expr(n.children[i], 0);
          }
        }
        out_ << ')';
        return;
      }
      case NodeKind::BetweenExpr:
        expr(n.children.at(0), 5);
        out_ << ' ' << (n.value.empty() ? "BETWEEN" : n.value) << ' ';
        expr(n.children.at(1), 5);
        out_ << " AND ";
        expr(n.children.at(2), 5);
        return;
      case NodeKind::LikeExpr:
        expr(n.children.at(0), 5);
        out_ << ' ' << (n.value.empty() ? "LIKE" : n.value) << ' ';
        expr(n.children.at(1), 5);
        return;
      case NodeKind::IsNullExpr:
        expr(n.children.at(0), 5);
        out_ << ' ' << (n.value.empty() ? "IS NULL" : n.value);
        return;
      case NodeKind::FunctionCall: {
        out_ << n.value << '(';
        bool first = true;
        for (const AstNode& a : n.children) {
          if (!first) out_ << ", ";
          first = false;
          if (a.kind == NodeKind::Star)
            out_ << a.value;
          else
            expr(a, 0);
        }
        out_ << ')';
        return;
      }
      case NodeKind::CaseExpr: {
        out_ << "CASE";
        size_t i = 0;
        if (!n.children.empty() && n.children[0].kind != NodeKind::WhenArm) {
          out_ << ' ';
          expr(n.children[0], 0);
          i = 1;
        }
        for (; i < n.children.size() && n.children[i].kind == NodeKind::WhenArm;
             ++i) {
          out_ << " WHEN ";
          expr(n.children[i].children.at(0), 0);
          out_ << " THEN ";
          expr(n.children[i].children.at(1), 0);
        }
        if (i < n.children.size()) {
          out_ << " ELSE ";
          expr(n.children[i], 0);
        }
        out_ << " END";
        return;
      }
      case NodeKind::Subquery:
        out_ << '(';
        node(n.children.at(0));
        out_ << ')';
        return;
      default:
        throw Error(std::string("unexpected expression node: ") +
                    kind_name(n.kind));
    }
  }

  std::ostringstream out_;
};

}  // namespace

std::string render_sql(const AstNode& root) {
  Renderer r;
  return r.render(root);
}

std::string render_sql(const SqlAst& ast) { return render_sql(ast.root); }

std::string canonical_fingerprint(const AstNode& root) {
  return fnv1a_hex(render_sql(root));
}

std::string canonical_fingerprint(const SqlAst& ast) {
  return canonical_fingerprint(ast.root);
}

}  // namespace sqlfix
