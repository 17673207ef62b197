#pragma once

#include <string>

#include "sqlfix/ast.hpp"

namespace sqlfix {

// Single-line canonical text: uppercase keywords, single spaces, parentheses
// only where precedence requires them. parse(render(parse(q))) is
// structurally equal to parse(q) for every supported query.
std::string render_sql(const SqlAst& ast);
std::string render_sql(const AstNode& root);

// FNV-1a hex digest of the canonical rendering; used as the tree fingerprint
// in edit scripts and pool entries.
std::string canonical_fingerprint(const SqlAst& ast);
std::string canonical_fingerprint(const AstNode& root);

}  // namespace sqlfix
