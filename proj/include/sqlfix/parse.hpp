#pragma once

#include <string_view>

#include "sqlfix/ast.hpp"

namespace sqlfix {

// Parses one statement of the supported SQL subset: SELECT with DISTINCT,
// joins with ON, WHERE, GROUP BY, HAVING, ORDER BY ASC/DESC, LIMIT/OFFSET,
// aggregate and generic function calls, CASE, IN/BETWEEN/LIKE/IS NULL,
// AND/OR/NOT, arithmetic and comparison operators, aliases, scalar and
// FROM/WHERE subqueries, UNION/UNION ALL. A trailing semicolon is accepted.
//
// Throws ParseError with a byte offset and an expected-token hint for
// anything outside the subset or malformed.
SqlAst parse_sql(std::string_view text);

}  // namespace sqlfix
