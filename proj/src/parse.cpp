#include "sqlfix/parse.hpp"

#include <cctype>
#include <string>
#include <unordered_set>
#include <utility>

#include "sqlfix/errors.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {

enum class TokKind { Ident, Keyword, Number, String, Symbol, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;   // keywords uppercased, identifiers as written
  size_t offset = 0;  // byte offset of the first character
};

const std::unordered_set<std::string>& keyword_set() {
  static const std::unordered_set<std::string> kw = {
      "SELECT", "DISTINCT", "FROM",  "WHERE", "GROUP",  "BY",    "HAVING",
      "ORDER",  "LIMIT",    "OFFSET", "AS",   "ON",     "JOIN",  "INNER",
      "LEFT",   "RIGHT",    "FULL",  "OUTER", "CROSS",  "UNION", "ALL",
      "AND",    "OR",       "NOT",   "IN",    "BETWEEN", "LIKE", "IS",
      "NULL",   "CASE",     "WHEN",  "THEN",  "ELSE",   "END",   "ASC",
      "DESC",   "TRUE",     "FALSE",
  };
  return kw;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return cur_; }
  const Token& peek2() {
    if (!have_next_) {
      next_ = lex();
      have_next_ = true;
    }
    return next_;
  }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    if (have_next_) {
      cur_ = next_;
      have_next_ = false;
    } else {
      cur_ = lex();
    }
  }

  Token lex() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= text_.size()) {
      t.kind = TokKind::End;
      return t;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      std::string word(text_.substr(start, pos_ - start));
      std::string upper = to_upper_ascii(word);
      if (keyword_set().count(upper)) {
        t.kind = TokKind::Keyword;
        t.text = upper;
      } else {
        t.kind = TokKind::Ident;
        t.text = word;
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '.' &&
          pos_ + 1 < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        size_t mark = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
          ++pos_;
        if (pos_ < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        } else {
          pos_ = mark;  // not an exponent, leave the 'e' for the next token
        }
      }
      t.kind = TokKind::Number;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (c == '\'') {
      ++pos_;
      std::string content;
      while (true) {
        if (pos_ >= text_.size())
          throw ParseError(t.offset, "closing quote",
                           "unterminated string literal at offset " +
                               std::to_string(t.offset));
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            content.push_back('\'');
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        content.push_back(text_[pos_++]);
      }
      t.kind = TokKind::String;
      t.text = std::move(content);
      return t;
    }
    // Multi-character symbols first.
    static const char* two[] = {"<=", ">=", "<>", "!=", "||"};
    for (const char* s : two) {
      if (text_.substr(pos_, 2) == s) {
        pos_ += 2;
        t.kind = TokKind::Symbol;
        t.text = s;
        if (t.text == "!=") t.text = "<>";
        return t;
      }
    }
    static const std::string singles = "(),.*/%+-=<>;";
    if (singles.find(c) != std::string::npos) {
      ++pos_;
      t.kind = TokKind::Symbol;
      t.text = std::string(1, c);
      return t;
    }
    throw ParseError(pos_, "token",
                     "unexpected character '" + std::string(1, c) +
                         "' at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  size_t pos_ = 0;
  Token cur_;
  Token next_;
  bool have_next_ = false;
};

AstNode make(NodeKind kind, std::string value = {}) {
  AstNode n;
  n.kind = kind;
  n.value = std::move(value);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  AstNode parse_statement() {
    AstNode q = parse_query_expr();
    if (at_symbol(";")) lex_.take();
    expect_end();
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = lex_.peek();
    std::string got = t.kind == TokKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.offset, expected,
                     "expected " + expected + ", got " + got + " at offset " +
                         std::to_string(t.offset));
  }

  bool at_keyword(const char* kw) const {
    return lex_.peek().kind == TokKind::Keyword && lex_.peek().text == kw;
  }
  bool at_symbol(const char* s) const {
    return lex_.peek().kind == TokKind::Symbol && lex_.peek().text == s;
  }
  void expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("'") + kw + "'");
    lex_.take();
  }
  void expect_symbol(const char* s) {
    if (!at_symbol(s)) fail(std::string("'") + s + "'");
    lex_.take();
  }
  void expect_end() {
    if (lex_.peek().kind != TokKind::End) fail("end of statement");
  }

  // query_expr := select_stmt (UNION [ALL] select_stmt)*
  AstNode parse_query_expr() {
    AstNode left = parse_select();
    while (at_keyword("UNION")) {
      lex_.take();
      std::string op = "UNION";
      if (at_keyword("ALL")) {
        lex_.take();
        op = "UNION ALL";
      }
      AstNode right = parse_select();
      AstNode setop = make(NodeKind::SetOp, op);
      setop.children.push_back(std::move(left));
      setop.children.push_back(std::move(right));
      left = std::move(setop);
    }
    return left;
  }

  AstNode parse_select() {
    expect_keyword("SELECT");
    AstNode query = make(NodeKind::Query);
    AstNode select = make(NodeKind::SelectClause);
    if (at_keyword("DISTINCT")) {
      lex_.take();
      select.value = "DISTINCT";
    }
    select.children.push_back(parse_select_item());
    while (at_symbol(",")) {
      lex_.take();
      select.children.push_back(parse_select_item());
    }
    query.children.push_back(std::move(select));

    if (at_keyword("FROM")) {
      lex_.take();
      query.children.push_back(parse_from());
    }
    if (at_keyword("WHERE")) {
      lex_.take();
      AstNode where = make(NodeKind::WhereClause);
      where.children.push_back(parse_expr());
      query.children.push_back(std::move(where));
    }
    if (at_keyword("GROUP")) {
      lex_.take();
      expect_keyword("BY");
      AstNode group = make(NodeKind::GroupByClause);
      group.children.push_back(parse_expr());
      while (at_symbol(",")) {
        lex_.take();
        group.children.push_back(parse_expr());
      }
      query.children.push_back(std::move(group));
    }
    if (at_keyword("HAVING")) {
      lex_.take();
      AstNode having = make(NodeKind::HavingClause);
      having.children.push_back(parse_expr());
      query.children.push_back(std::move(having));
    }
    if (at_keyword("ORDER")) {
      lex_.take();
      expect_keyword("BY");
      AstNode order = make(NodeKind::OrderByClause);
      order.children.push_back(parse_order_item());
      while (at_symbol(",")) {
        lex_.take();
        order.children.push_back(parse_order_item());
      }
      query.children.push_back(std::move(order));
    }
    if (at_keyword("LIMIT")) {
      lex_.take();
      AstNode limit = make(NodeKind::LimitClause);
      limit.children.push_back(parse_number_literal("LIMIT count"));
      if (at_keyword("OFFSET")) {
        lex_.take();
        limit.children.push_back(parse_number_literal("OFFSET count"));
      }
      query.children.push_back(std::move(limit));
    }
    return query;
  }

  AstNode parse_number_literal(const std::string& what) {
    if (lex_.peek().kind != TokKind::Number) fail(what);
    return make(NodeKind::Literal, lex_.take().text);
  }

  AstNode parse_select_item() {
    AstNode item = make(NodeKind::SelectItem);
    if (at_symbol("*")) {
      lex_.take();
      item.children.push_back(make(NodeKind::Star, "*"));
      return item;
    }
    // Qualified star: ident '.' '*'
    if (lex_.peek().kind == TokKind::Ident && lex_.peek2().kind == TokKind::Symbol &&
        lex_.peek2().text == ".") {
      // Need a third lookahead for '*'; parse the ident provisionally.
      Token ident = lex_.take();
      lex_.take();  // '.'
      if (at_symbol("*")) {
        lex_.take();
        item.children.push_back(make(NodeKind::Star, ident.text + ".*"));
        return item;
      }
      if (lex_.peek().kind != TokKind::Ident) fail("column name after '.'");
      Token col = lex_.take();
      AstNode expr = make(NodeKind::ColumnRef, ident.text + "." + col.text);
      item.children.push_back(parse_expr_continued(std::move(expr)));
      maybe_alias(item);
      return item;
    }
    item.children.push_back(parse_expr());
    maybe_alias(item);
    return item;
  }

  void maybe_alias(AstNode& parent) {
    if (at_keyword("AS")) {
      lex_.take();
      if (lex_.peek().kind != TokKind::Ident) fail("alias name");
      parent.children.push_back(make(NodeKind::Alias, lex_.take().text));
    } else if (lex_.peek().kind == TokKind::Ident) {
      parent.children.push_back(make(NodeKind::Alias, lex_.take().text));
    }
  }

  AstNode parse_from() {
    AstNode from = make(NodeKind::FromClause);
    from.children.push_back(parse_table_item());
    while (true) {
      if (at_symbol(",")) {
        lex_.take();
        from.children.push_back(parse_table_item());
        continue;
      }
      std::string join_type;
      if (at_keyword("JOIN")) {
        lex_.take();
        join_type = "INNER";
      } else if (at_keyword("INNER")) {
        lex_.take();
        expect_keyword("JOIN");
        join_type = "INNER";
      } else if (at_keyword("LEFT") || at_keyword("RIGHT") || at_keyword("FULL")) {
        join_type = lex_.take().text;
        if (at_keyword("OUTER")) lex_.take();
        expect_keyword("JOIN");
      } else if (at_keyword("CROSS")) {
        lex_.take();
        expect_keyword("JOIN");
        join_type = "CROSS";
      } else {
        break;
      }
      AstNode join = make(NodeKind::Join, join_type);
      join.children.push_back(parse_table_item());
      if (at_keyword("ON")) {
        lex_.take();
        AstNode cond = make(NodeKind::JoinCondition);
        cond.children.push_back(parse_expr());
        join.children.push_back(std::move(cond));
      } else if (join_type != "CROSS") {
        fail("'ON'");
      }
      from.children.push_back(std::move(join));
    }
    return from;
  }

  AstNode parse_table_item() {
    if (at_symbol("(")) {
      lex_.take();
      if (!at_keyword("SELECT")) fail("subquery");
      AstNode sub = make(NodeKind::Subquery);
      sub.children.push_back(parse_query_expr());
      expect_symbol(")");
      maybe_alias(sub);
      return sub;
    }
    if (lex_.peek().kind != TokKind::Ident) fail("table name");
    AstNode table = make(NodeKind::TableRef, lex_.take().text);
    maybe_alias(table);
    return table;
  }

  AstNode parse_order_item() {
    AstNode item = make(NodeKind::OrderItem, "ASC");
    item.children.push_back(parse_expr());
    if (at_keyword("ASC")) {
      lex_.take();
    } else if (at_keyword("DESC")) {
      lex_.take();
      item.value = "DESC";
    }
    return item;
  }

  AstNode parse_expr() { return parse_or(); }

  // Used when a prefix of a primary expression was already consumed.
  AstNode parse_expr_continued(AstNode primary) {
    return continue_binary(std::move(primary));
  }

  // Rebuilds the precedence climb above an already-parsed primary.
  AstNode continue_binary(AstNode lhs) {
    lhs = continue_concat(std::move(lhs));
    lhs = continue_mult(std::move(lhs));
    lhs = continue_add(std::move(lhs));
    lhs = continue_predicate(std::move(lhs));
    lhs = continue_and(std::move(lhs));
    lhs = continue_or(std::move(lhs));
    return lhs;
  }

  AstNode parse_or() {
    AstNode lhs = parse_and();
    return continue_or(std::move(lhs));
  }
  AstNode continue_or(AstNode lhs) {
    while (at_keyword("OR")) {
      lex_.take();
      AstNode op = make(NodeKind::BinaryOp, "OR");
      op.children.push_back(std::move(lhs));
      op.children.push_back(parse_and());
      lhs = std::move(op);
    }
    return lhs;
  }

  AstNode parse_and() {
    AstNode lhs = parse_not();
    return continue_and(std::move(lhs));
  }
  AstNode continue_and(AstNode lhs) {
    while (at_keyword("AND")) {
      lex_.take();
      AstNode op = make(NodeKind::BinaryOp, "AND");
      op.children.push_back(std::move(lhs));
      op.children.push_back(parse_not());
      lhs = std::move(op);
    }
    return lhs;
  }

  AstNode parse_not() {
    if (at_keyword("NOT")) {
      lex_.take();
      AstNode op = make(NodeKind::UnaryOp, "NOT");
      op.children.push_back(parse_not());
      return op;
    }
    return parse_predicate();
  }

  AstNode parse_predicate() {
    AstNode lhs = parse_additive();
    return continue_predicate(std::move(lhs));
  }

  AstNode continue_predicate(AstNode lhs) {
    while (true) {
      if (lex_.peek().kind == TokKind::Symbol) {
        const std::string& s = lex_.peek().text;
        if (s == "=" || s == "<>" || s == "<" || s == "<=" || s == ">" ||
            s == ">=") {
          std::string op = lex_.take().text;
          AstNode cmp = make(NodeKind::BinaryOp, op);
          cmp.children.push_back(std::move(lhs));
          cmp.children.push_back(parse_additive());
          lhs = std::move(cmp);
          continue;
        }
      }
      bool negated = false;
      if (at_keyword("NOT") &&
          (lex_.peek2().kind == TokKind::Keyword &&
           (lex_.peek2().text == "IN" || lex_.peek2().text == "BETWEEN" ||
            lex_.peek2().text == "LIKE"))) {
        lex_.take();
        negated = true;
      }
      if (at_keyword("IN")) {
        lex_.take();
        expect_symbol("(");
        AstNode in = make(NodeKind::InList, negated ? "NOT IN" : "IN");
        in.children.push_back(std::move(lhs));
        if (at_keyword("SELECT")) {
          AstNode sub = make(NodeKind::Subquery);
          sub.children.push_back(parse_query_expr());
          in.children.push_back(std::move(sub));
        } else {
          in.children.push_back(parse_expr());
          while (at_symbol(",")) {
            lex_.take();
            in.children.push_back(parse_expr());
          }
        }
        expect_symbol(")");
        lhs = std::move(in);
        continue;
      }
      if (at_keyword("BETWEEN")) {
        lex_.take();
        AstNode btw = make(NodeKind::BetweenExpr,
                           negated ? "NOT BETWEEN" : "BETWEEN");
        btw.children.push_back(std::move(lhs));
        btw.children.push_back(parse_additive());
        expect_keyword("AND");
        btw.children.push_back(parse_additive());
        lhs = std::move(btw);
        continue;
      }
      if (at_keyword("LIKE")) {
        lex_.take();
        AstNode like = make(NodeKind::LikeExpr, negated ? "NOT LIKE" : "LIKE");
        like.children.push_back(std::move(lhs));
        like.children.push_back(parse_additive());
        lhs = std::move(like);
        continue;
      }
      if (negated) fail("'IN', 'BETWEEN' or 'LIKE'");
      if (at_keyword("IS")) {
        lex_.take();
        bool not_null = false;
        if (at_keyword("NOT")) {
          lex_.take();
          not_null = true;
        }
        expect_keyword("NULL");
        AstNode isn = make(NodeKind::IsNullExpr, not_null ? "IS NOT NULL" : "IS NULL");
        isn.children.push_back(std::move(lhs));
        lhs = std::move(isn);
        continue;
      }
      return lhs;
    }
  }

  AstNode parse_additive() {
    AstNode lhs = parse_mult();
    return continue_add(std::move(lhs));
  }
  AstNode continue_add(AstNode lhs) {
    while (lex_.peek().kind == TokKind::Symbol &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      std::string op = lex_.take().text;
      AstNode bin = make(NodeKind::BinaryOp, op);
      bin.children.push_back(std::move(lhs));
      bin.children.push_back(parse_mult());
      lhs = std::move(bin);
    }
    return lhs;
  }

  AstNode parse_mult() {
    AstNode lhs = parse_concat();
    return continue_mult(std::move(lhs));
  }
  AstNode continue_mult(AstNode lhs) {
    while (lex_.peek().kind == TokKind::Symbol &&
           (lex_.peek().text == "*" || lex_.peek().text == "/" ||
            lex_.peek().text == "%")) {
      std::string op = lex_.take().text;
      AstNode bin = make(NodeKind::BinaryOp, op);
      bin.children.push_back(std::move(lhs));
      bin.children.push_back(parse_concat());
      lhs = std::move(bin);
    }
    return lhs;
  }

  AstNode parse_concat() {
    AstNode lhs = parse_unary();
    return continue_concat(std::move(lhs));
  }
  AstNode continue_concat(AstNode lhs) {
    while (at_symbol("||")) {
      lex_.take();
      AstNode bin = make(NodeKind::BinaryOp, "||");
      bin.children.push_back(std::move(lhs));
      bin.children.push_back(parse_unary());
      lhs = std::move(bin);
    }
    return lhs;
  }

  AstNode parse_unary() {
    if (at_symbol("-") || at_symbol("+")) {
      std::string op = lex_.take().text;
      AstNode un = make(NodeKind::UnaryOp, op);
      un.children.push_back(parse_unary());
      return un;
    }
    return parse_primary();
  }

  AstNode parse_primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case TokKind::Number:
        return make(NodeKind::Literal, lex_.take().text);
      case TokKind::String:
        return make(NodeKind::Literal, lex_.take().text);
      case TokKind::Keyword: {
        if (t.text == "NULL" || t.text == "TRUE" || t.text == "FALSE")
          return make(NodeKind::Literal, lex_.take().text);
        if (t.text == "CASE") return parse_case();
        fail("expression");
      }
      case TokKind::Ident: {
        Token ident = lex_.take();
        if (at_symbol("(")) return parse_function_call(ident.text);
        if (at_symbol(".")) {
          lex_.take();
          if (lex_.peek().kind != TokKind::Ident) fail("column name after '.'");
          Token col = lex_.take();
          return make(NodeKind::ColumnRef, ident.text + "." + col.text);
        }
        return make(NodeKind::ColumnRef, ident.text);
      }
      case TokKind::Symbol: {
        if (t.text == "(") {
          lex_.take();
          if (at_keyword("SELECT")) {
            AstNode sub = make(NodeKind::Subquery);
            sub.children.push_back(parse_query_expr());
            expect_symbol(")");
            return sub;
          }
          AstNode inner = parse_expr();
          expect_symbol(")");
          return inner;
        }
        fail("expression");
      }
      case TokKind::End:
        fail("expression");
    }
    fail("expression");
  }

  AstNode parse_function_call(const std::string& name) {
    expect_symbol("(");
    AstNode call = make(NodeKind::FunctionCall, to_upper_ascii(name));
    if (at_symbol(")")) {
      lex_.take();
      return call;
    }
    if (at_symbol("*")) {
      lex_.take();
      call.children.push_back(make(NodeKind::Star, "*"));
      expect_symbol(")");
      return call;
    }
    bool distinct = false;
    if (at_keyword("DISTINCT")) {
      lex_.take();
      distinct = true;
    }
    AstNode first = parse_expr();
    if (distinct) {
      AstNode wrap = make(NodeKind::UnaryOp, "DISTINCT");
      wrap.children.push_back(std::move(first));
      first = std::move(wrap);
    }
    call.children.push_back(std::move(first));
    while (at_symbol(",")) {
      lex_.take();
      call.children.push_back(parse_expr());
    }
    expect_symbol(")");
    return call;
  }

  AstNode parse_case() {
    expect_keyword("CASE");
    AstNode c = make(NodeKind::CaseExpr);
    if (!at_keyword("WHEN")) c.children.push_back(parse_expr());
    if (!at_keyword("WHEN")) fail("'WHEN'");
    while (at_keyword("WHEN")) {
      lex_.take();
      AstNode arm = make(NodeKind::WhenArm);
      arm.children.push_back(parse_expr());
      expect_keyword("THEN");
      arm.children.push_back(parse_expr());
      c.children.push_back(std::move(arm));
    }
    if (at_keyword("ELSE")) {
      lex_.take();
      c.children.push_back(parse_expr());
    }
    expect_keyword("END");
    return c;
  }

  Lexer lex_;
};

}  // namespace

SqlAst parse_sql(std::string_view text) {
  if (trim(text).empty())
    throw ParseError(0, "statement", "empty input");
  Parser p(text);
  SqlAst ast;
  ast.root = p.parse_statement();
  ast.source = std::string(text);
  assign_preorder_ids(ast.root);
  return ast;
}

}  // namespace sqlfix
