#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sqlfix/ast.hpp"

namespace sqlfix {

// Node matching between two trees: (source node id, target node id) pairs.
// Each id appears at most once and matched nodes have identical kinds.
struct NodeMatching {
  std::vector<std::pair<int, int>> pairs;  // sorted by source id

  bool has_source(int sid) const;
  bool has_target(int did) const;
};

enum class EditOpType { Insert, Delete, Move, Update };

// One step of a node path: child index plus the expected kind at that child.
// Paths are rooted at a virtual super-root, so the statement root itself is
// step [0, <root kind>]. Strict application validates both index and kind;
// forced application falls back to the first child of the expected kind.
struct PathStep {
  int index = 0;
  NodeKind kind = NodeKind::Query;
  bool operator==(const PathStep&) const = default;
};

struct EditOp {
  EditOpType type = EditOpType::Update;
  NodeKind kind = NodeKind::Query;  // subject descriptor
  std::string value;                // subject value (old value for Update)
  std::vector<PathStep> path;       // subject address (Update/Move/Delete)
  std::vector<PathStep> parent;     // target parent address (Insert/Move)
  int position = 0;                 // child index (Insert/Move)
  std::string new_value;            // Update only
  NodeKind context = NodeKind::Query;  // nearest enclosing clause, for text
};

// Ordered tree-transform from a source tree into a target tree. Empty iff
// the trees are structurally equal.
struct EditScript {
  std::vector<EditOp> ops;
  std::string source_fingerprint;
  std::string target_fingerprint;

  bool empty() const { return ops.empty(); }
};

// Change-Distiller-style matching: leaves pair greedily by bigram Dice
// similarity of values (threshold 0.6); inner nodes pair greedily by the
// ratio of commonly matched leaf descendants (threshold 0.6, relaxed to 0.4
// for subtrees of at most four leaves) with node-value Dice as tie-breaker.
NodeMatching match_nodes(const SqlAst& src, const SqlAst& dst);

// Derives Update, Move, Insert (top-down) and Delete (bottom-up) operations
// from the matching. Applying the script to src yields dst.
EditScript generate_edit_script(const SqlAst& src, const SqlAst& dst);

// Applies a script. Without force the tree's canonical fingerprint must
// equal the script's source fingerprint (FingerprintMismatch otherwise) and
// every address must resolve exactly. With force, addressing is best-effort
// by kind path and positions are clamped; unresolvable ops raise
// InvalidPosition.
SqlAst apply_edit_script(const SqlAst& ast, const EditScript& script,
                         bool force = false);

// One numbered English line per op; "No changes required." for an empty
// script.
std::string describe_edit_script(const EditScript& script);

// Stable JSON round trip used inside pool files.
std::string script_to_json(const EditScript& script);
EditScript script_from_json(const std::string& json_text);

}  // namespace sqlfix
