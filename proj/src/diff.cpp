#include "sqlfix/diff.hpp"

#include <algorithm>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/render.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Flat read-only view of a tree, indexed by pre-order id.
// ---------------------------------------------------------------------------

struct FlatTree {
  std::vector<const AstNode*> nodes;
  std::vector<int> parent;        // -1 for root
  std::vector<int> subtree_size;  // nodes in subtree, self included
  std::vector<int> leaf_count;    // leaves in subtree
  std::vector<std::string> kind_path;  // kinds from root encoded as chars
  std::vector<int> leaf_ids;      // all leaf ids, ascending

  int count() const { return int(nodes.size()); }
  bool is_leaf(int id) const { return nodes[id]->children.empty(); }
  bool in_subtree(int node, int root) const {
    return node >= root && node < root + subtree_size[root];
  }
  // Leaf ids inside the subtree of `root`, as a slice of leaf_ids.
  std::pair<int, int> leaf_slice(int root) const {
    auto lo = std::lower_bound(leaf_ids.begin(), leaf_ids.end(), root);
    auto hi = std::lower_bound(leaf_ids.begin(), leaf_ids.end(),
                               root + subtree_size[root]);
    return {int(lo - leaf_ids.begin()), int(hi - leaf_ids.begin())};
  }
};

int flatten_rec(const AstNode& n, int parent, std::string& path, FlatTree& t) {
  int id = t.count();
  t.nodes.push_back(&n);
  t.parent.push_back(parent);
  t.subtree_size.push_back(1);
  t.leaf_count.push_back(n.children.empty() ? 1 : 0);
  path.push_back(char('A' + int(n.kind)));
  t.kind_path.push_back(path);
  for (const AstNode& c : n.children) {
    int sub = flatten_rec(c, id, path, t);
    t.subtree_size[id] += t.subtree_size[sub];
    t.leaf_count[id] += t.leaf_count[sub];
  }
  path.pop_back();
  if (n.children.empty()) t.leaf_ids.push_back(id);
  return id;
}

FlatTree flatten(const AstNode& root) {
  FlatTree t;
  std::string path;
  flatten_rec(root, -1, path, t);
  return t;
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

struct Candidate {
  double sim;
  double tie;
  int sid;
  int did;
};

void greedy_assign(std::vector<Candidate>& cands, std::vector<int>& msrc,
                   std::vector<int>& mdst) {
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    if (a.tie != b.tie) return a.tie > b.tie;
    if (a.sid != b.sid) return a.sid < b.sid;
    return a.did < b.did;
  });
  for (const Candidate& c : cands) {
    if (msrc[c.sid] >= 0 || mdst[c.did] >= 0) continue;
    msrc[c.sid] = c.did;
    mdst[c.did] = c.sid;
  }
}

void match_trees(const FlatTree& S, const FlatTree& D, std::vector<int>& msrc,
                 std::vector<int>& mdst) {
  msrc.assign(S.count(), -1);
  mdst.assign(D.count(), -1);

  // Leaves: value similarity with the kind path as tie-breaker so that
  // equal-valued leaves prefer structurally matching contexts.
  std::vector<Candidate> cands;
  for (int s : S.leaf_ids) {
    for (int d : D.leaf_ids) {
      if (S.nodes[s]->kind != D.nodes[d]->kind) continue;
      double dice = dice_bigram(S.nodes[s]->value, D.nodes[d]->value);
      if (dice < 0.6) continue;
      cands.push_back({dice, dice_bigram(S.kind_path[s], D.kind_path[d]), s, d});
    }
  }
  greedy_assign(cands, msrc, mdst);

  // Inner nodes: ratio of commonly matched leaf descendants, with a relaxed
  // threshold for small subtrees and node-value Dice as tie-breaker.
  cands.clear();
  for (int s = 0; s < S.count(); ++s) {
    if (S.is_leaf(s)) continue;
    for (int d = 0; d < D.count(); ++d) {
      if (D.is_leaf(d)) continue;
      if (S.nodes[s]->kind != D.nodes[d]->kind) continue;
      int maxleaf = std::max(S.leaf_count[s], D.leaf_count[d]);
      if (maxleaf == 0) continue;
      auto [lo, hi] = S.leaf_slice(s);
      int common = 0;
      for (int i = lo; i < hi; ++i) {
        int a = S.leaf_ids[i];
        int b = msrc[a];
        if (b >= 0 && D.in_subtree(b, d)) ++common;
      }
      double sim = double(common) / double(maxleaf);
      double threshold = maxleaf <= 4 ? 0.4 : 0.6;
      if (sim < threshold || common == 0) continue;
      cands.push_back(
          {sim, dice_bigram(S.nodes[s]->value, D.nodes[d]->value), s, d});
    }
  }
  greedy_assign(cands, msrc, mdst);
}

// ---------------------------------------------------------------------------
// Mutable working tree used by script generation and application. A virtual
// super-root holds the statement root so root replacement needs no special
// casing; node paths start below it.
// ---------------------------------------------------------------------------

struct WNode {
  NodeKind kind = NodeKind::Query;
  std::string value;
  WNode* parent = nullptr;
  std::vector<std::unique_ptr<WNode>> ch;

  int index_in_parent() const {
    for (size_t i = 0; i < parent->ch.size(); ++i)
      if (parent->ch[i].get() == this) return int(i);
    throw Error("corrupt working tree");
  }
};

std::unique_ptr<WNode> to_work(const AstNode& n, WNode* parent) {
  auto w = std::make_unique<WNode>();
  w->kind = n.kind;
  w->value = n.value;
  w->parent = parent;
  for (const AstNode& c : n.children) w->ch.push_back(to_work(c, w.get()));
  return w;
}

std::unique_ptr<WNode> make_virtual_root(const AstNode& real_root) {
  auto v = std::make_unique<WNode>();
  v->ch.push_back(to_work(real_root, v.get()));
  return v;
}

AstNode to_ast(const WNode& w) {
  AstNode n;
  n.kind = w.kind;
  n.value = w.value;
  for (const auto& c : w.ch) n.children.push_back(to_ast(*c));
  return n;
}

bool work_equals_ast(const WNode& w, const AstNode& a) {
  if (w.kind != a.kind || w.value != a.value || w.ch.size() != a.children.size())
    return false;
  for (size_t i = 0; i < w.ch.size(); ++i)
    if (!work_equals_ast(*w.ch[i], a.children[i])) return false;
  return true;
}

std::vector<PathStep> path_of(const WNode* n) {
  std::vector<PathStep> path;
  while (n->parent != nullptr) {
    path.push_back({n->index_in_parent(), n->kind});
    n = n->parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::unique_ptr<WNode> detach(WNode* n) {
  WNode* p = n->parent;
  int idx = n->index_in_parent();
  std::unique_ptr<WNode> owned = std::move(p->ch[idx]);
  p->ch.erase(p->ch.begin() + idx);
  owned->parent = nullptr;
  return owned;
}

void attach(WNode* parent, std::unique_ptr<WNode> child, int pos) {
  child->parent = parent;
  parent->ch.insert(parent->ch.begin() + pos, std::move(child));
}

bool is_context_kind(NodeKind k) {
  switch (k) {
    case NodeKind::SelectClause:
    case NodeKind::FromClause:
    case NodeKind::WhereClause:
    case NodeKind::GroupByClause:
    case NodeKind::HavingClause:
    case NodeKind::OrderByClause:
    case NodeKind::LimitClause:
    case NodeKind::JoinCondition:
    case NodeKind::CaseExpr:
    case NodeKind::Subquery:
      return true;
    default:
      return false;
  }
}

NodeKind work_context(const WNode* n) {
  for (const WNode* p = n->parent; p != nullptr && p->parent != nullptr;
       p = p->parent)
    if (is_context_kind(p->kind)) return p->kind;
  return NodeKind::Query;
}

NodeKind flat_context(const FlatTree& t, int id) {
  for (int p = t.parent[id]; p >= 0; p = t.parent[p])
    if (is_context_kind(t.nodes[p]->kind)) return t.nodes[p]->kind;
  return NodeKind::Query;
}

// ---------------------------------------------------------------------------
// Script generation
// ---------------------------------------------------------------------------

class ScriptGenerator {
 public:
  ScriptGenerator(const SqlAst& src, const SqlAst& dst)
      : src_(flatten(src.root)), dst_(flatten(dst.root)), dst_root_(&dst.root) {
    match_trees(src_, dst_, msrc_, mdst_);
    demote_under_inserts();
    work_root_ = make_virtual_root(src.root);
    index_work(work_root_->ch[0].get(), 0);
    cpt_.assign(dst_.count(), nullptr);
    for (int d = 0; d < dst_.count(); ++d)
      if (mdst_[d] >= 0) set_cpt(d, work_of_[mdst_[d]]);
    in_order_.assign(dst_.count(), false);
    bfs_ = bfs_order();
  }

  EditScript run() {
    EditScript script;
    phase_updates(script);
    phase_moves(script);
    phase_inserts(script);
    phase_deletes(script);
    if (work_root_->ch.size() != 1 ||
        !work_equals_ast(*work_root_->ch[0], *dst_root_)) {
      // Matching found no usable alignment for this pair; fall back to a
      // rebuild script, which is always applicable.
      return fallback_script();
    }
    return script;
  }

 private:
  void demote_under_inserts() {
    // A matched target node whose parent will be freshly inserted cannot be
    // moved before the insert happens; demote it (and transitively its
    // matched descendants) to insert+delete.
    std::vector<bool> insert_destined(dst_.count(), false);
    for (int d = 0; d < dst_.count(); ++d) {
      int p = dst_.parent[d];
      bool parent_destined = p >= 0 && insert_destined[p];
      if (mdst_[d] < 0 || parent_destined) {
        insert_destined[d] = true;
        if (mdst_[d] >= 0) {
          msrc_[mdst_[d]] = -1;
          mdst_[d] = -1;
        }
      }
    }
  }

  void index_work(WNode* w, int sid) {
    // Work tree mirrors the source tree; pre-order ids line up.
    if (int(work_of_.size()) != sid) throw Error("work index out of sync");
    work_of_.push_back(w);
    int next = sid + 1;
    for (auto& c : w->ch) {
      index_work(c.get(), next);
      next += src_.subtree_size[next];
    }
  }

  void set_cpt(int did, WNode* w) {
    cpt_[did] = w;
    did_of_[w] = did;
  }

  // Level order, children left to right: the queue grows as it is scanned.
  std::vector<int> bfs_order() const {
    std::vector<int> order;
    order.push_back(0);
    for (size_t i = 0; i < order.size(); ++i) {
      int id = order[i];
      int child = id + 1;
      int end = id + dst_.subtree_size[id];
      while (child < end) {
        order.push_back(child);
        child += dst_.subtree_size[child];
      }
    }
    return order;
  }

  WNode* parent_cpt(int d) {
    int p = dst_.parent[d];
    return p < 0 ? work_root_.get() : cpt_[p];
  }

  // Rightmost already-placed left sibling decides the landing index.
  int find_pos(int d) {
    int p = dst_.parent[d];
    int first = p < 0 ? 0 : p + 1;
    int end = p < 0 ? dst_.count() : p + dst_.subtree_size[p];
    int v = -1;
    for (int sib = first; sib < end && sib != d; sib += dst_.subtree_size[sib])
      if (in_order_[sib] && cpt_[sib] != nullptr) v = sib;
    if (v < 0) return 0;
    return cpt_[v]->index_in_parent() + 1;
  }

  EditOp base_op(EditOpType type, NodeKind kind, const std::string& value) {
    EditOp op;
    op.type = type;
    op.kind = kind;
    op.value = value;
    return op;
  }

  void phase_updates(EditScript& script) {
    for (int d : bfs_) {
      if (mdst_[d] < 0) continue;
      WNode* w = cpt_[d];
      const std::string& nv = dst_.nodes[d]->value;
      if (w->value == nv) continue;
      EditOp op = base_op(EditOpType::Update, w->kind, w->value);
      op.path = path_of(w);
      op.new_value = nv;
      op.context = work_context(w);
      script.ops.push_back(std::move(op));
      w->value = nv;
    }
  }

  void phase_moves(EditScript& script) {
    for (int d : bfs_) {
      if (mdst_[d] < 0) continue;
      WNode* w = cpt_[d];
      WNode* z = parent_cpt(d);
      if (w->parent != z) {
        EditOp op = base_op(EditOpType::Move, w->kind, w->value);
        op.path = path_of(w);
        op.parent = path_of(z);
        op.context = work_context(w);
        auto owned = detach(w);
        int pos = find_pos(d);
        op.position = pos;
        attach(z, std::move(owned), pos);
        script.ops.push_back(std::move(op));
      }
      in_order_[d] = true;
      align_children(script, w, d);
    }
  }

  void align_children(EditScript& script, WNode* w, int d) {
    // Matched child pairs that are children on both sides.
    std::vector<WNode*> s1;
    for (auto& c : w->ch) {
      auto it = did_of_.find(c.get());
      if (it != did_of_.end() && dst_.parent[it->second] == d)
        s1.push_back(c.get());
    }
    std::vector<int> s2;
    int end = d + dst_.subtree_size[d];
    for (int c = d + 1; c < end; c += dst_.subtree_size[c])
      if (mdst_[c] >= 0 && cpt_[c]->parent == w) s2.push_back(c);
    if (s1.empty() || s2.empty()) return;

    // Longest common subsequence keeps the largest stable set in place.
    size_t n = s1.size(), m = s2.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;)
      for (size_t j = m; j-- > 0;) {
        if (did_of_.at(s1[i]) == s2[j])
          dp[i][j] = dp[i + 1][j + 1] + 1;
        else
          dp[i][j] = std::max(dp[i + 1][j], dp[i][j + 1]);
      }
    std::vector<bool> stable(dst_.count(), false);
    {
      size_t i = 0, j = 0;
      while (i < n && j < m) {
        if (did_of_.at(s1[i]) == s2[j]) {
          stable[s2[j]] = true;
          in_order_[s2[j]] = true;
          ++i;
          ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
          ++i;
        } else {
          ++j;
        }
      }
    }
    for (int b : s2) {
      if (stable[b]) continue;
      WNode* a = cpt_[b];
      EditOp op = base_op(EditOpType::Move, a->kind, a->value);
      op.path = path_of(a);
      op.parent = path_of(w);
      op.context = work_context(a);
      auto owned = detach(a);
      int pos = find_pos(b);
      op.position = pos;
      attach(w, std::move(owned), pos);
      script.ops.push_back(std::move(op));
      in_order_[b] = true;
    }
  }

  void phase_inserts(EditScript& script) {
    for (int d : bfs_) {
      if (mdst_[d] >= 0) continue;
      WNode* z = parent_cpt(d);
      EditOp op = base_op(EditOpType::Insert, dst_.nodes[d]->kind,
                          dst_.nodes[d]->value);
      op.parent = path_of(z);
      int pos = find_pos(d);
      op.position = pos;
      op.context = flat_context(dst_, d);
      auto node = std::make_unique<WNode>();
      node->kind = op.kind;
      node->value = op.value;
      WNode* raw = node.get();
      attach(z, std::move(node), pos);
      set_cpt(d, raw);
      mdst_[d] = -2;  // inserted marker: counterpart exists, not a match
      in_order_[d] = true;
      script.ops.push_back(std::move(op));
    }
    // Restore match flags for any later passes.
    for (int d = 0; d < dst_.count(); ++d)
      if (mdst_[d] == -2) mdst_[d] = -1;
  }

  void phase_deletes(EditScript& script) {
    delete_rec(script, 0);
  }

  void delete_rec(EditScript& script, int sid) {
    int child = sid + 1;
    int end = sid + src_.subtree_size[sid];
    while (child < end) {
      delete_rec(script, child);
      child += src_.subtree_size[child];
    }
    if (msrc_[sid] >= 0) return;
    WNode* w = work_of_[sid];
    EditOp op = base_op(EditOpType::Delete, w->kind, w->value);
    op.path = path_of(w);
    op.context = work_context(w);
    script.ops.push_back(std::move(op));
    detach(w);
  }

  EditScript fallback_script() {
    EditScript script;
    auto work = make_virtual_root(*src_.nodes[0]);
    std::vector<WNode*> cpt(dst_.count(), nullptr);
    for (int d = 0; d < dst_.count(); ++d) {
      WNode* z = d == 0 ? work.get() : cpt[dst_.parent[d]];
      int pos = d == 0 ? 0 : int(z->ch.size());
      EditOp op = base_op(EditOpType::Insert, dst_.nodes[d]->kind,
                          dst_.nodes[d]->value);
      op.parent = path_of(z);
      op.position = pos;
      op.context = flat_context(dst_, d);
      auto node = std::make_unique<WNode>();
      node->kind = op.kind;
      node->value = op.value;
      cpt[d] = node.get();
      attach(z, std::move(node), pos);
      script.ops.push_back(std::move(op));
    }
    // Original root subtree now sits at index 1 under the virtual root.
    std::vector<WNode*> order;
    collect_postorder(work->ch[1].get(), order);
    for (WNode* w : order) {
      EditOp op = base_op(EditOpType::Delete, w->kind, w->value);
      op.path = path_of(w);
      op.context = work_context(w);
      script.ops.push_back(std::move(op));
      detach(w);
    }
    return script;
  }

  static void collect_postorder(WNode* n, std::vector<WNode*>& out) {
    for (auto& c : n->ch) collect_postorder(c.get(), out);
    out.push_back(n);
  }

  FlatTree src_;
  FlatTree dst_;
  const AstNode* dst_root_;
  std::vector<int> msrc_;
  std::vector<int> mdst_;
  std::unique_ptr<WNode> work_root_;
  std::vector<WNode*> work_of_;      // by source id
  std::vector<WNode*> cpt_;          // by destination id
  std::unordered_map<const WNode*, int> did_of_;
  std::vector<bool> in_order_;
  std::vector<int> bfs_;
};

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

WNode* resolve_path(WNode* root, const std::vector<PathStep>& path, bool force) {
  WNode* cur = root;
  for (const PathStep& step : path) {
    WNode* next = nullptr;
    if (step.index >= 0 && step.index < int(cur->ch.size()) &&
        cur->ch[step.index]->kind == step.kind) {
      next = cur->ch[step.index].get();
    } else if (force) {
      for (auto& c : cur->ch) {
        if (c->kind == step.kind) {
          next = c.get();
          break;
        }
      }
    }
    if (next == nullptr)
      throw InvalidPosition(std::string("cannot resolve path step [") +
                            std::to_string(step.index) + ", " +
                            kind_name(step.kind) + "]");
    cur = next;
  }
  return cur;
}

bool is_ancestor(const WNode* maybe_anc, const WNode* n) {
  for (const WNode* p = n; p != nullptr; p = p->parent)
    if (p == maybe_anc) return true;
  return false;
}

void apply_op(WNode* root, const EditOp& op, bool force) {
  switch (op.type) {
    case EditOpType::Update: {
      WNode* subject = resolve_path(root, op.path, force);
      if (!force && subject->value != op.value)
        throw InvalidPosition("update target value mismatch: expected '" +
                              op.value + "', found '" + subject->value + "'");
      subject->value = op.new_value;
      return;
    }
    case EditOpType::Move: {
      WNode* subject = resolve_path(root, op.path, force);
      WNode* parent = resolve_path(root, op.parent, force);
      if (is_ancestor(subject, parent))
        throw InvalidPosition("move target parent inside moved subtree");
      auto owned = detach(subject);
      int pos = op.position;
      if (pos < 0 || pos > int(parent->ch.size())) {
        if (!force)
          throw InvalidPosition("move position out of range");
        pos = std::clamp(pos, 0, int(parent->ch.size()));
      }
      attach(parent, std::move(owned), pos);
      return;
    }
    case EditOpType::Insert: {
      WNode* parent = resolve_path(root, op.parent, force);
      int pos = op.position;
      if (pos < 0 || pos > int(parent->ch.size())) {
        if (!force)
          throw InvalidPosition("insert position out of range");
        pos = std::clamp(pos, 0, int(parent->ch.size()));
      }
      auto node = std::make_unique<WNode>();
      node->kind = op.kind;
      node->value = op.value;
      attach(parent, std::move(node), pos);
      return;
    }
    case EditOpType::Delete: {
      WNode* subject = resolve_path(root, op.path, force);
      if (!force && !subject->ch.empty())
        throw InvalidPosition("delete of a non-leaf node");
      detach(subject);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Description
// ---------------------------------------------------------------------------

std::string kind_noun(NodeKind kind, const std::string& value) {
  auto with_value = [&](const char* noun) {
    return value.empty() ? std::string(noun) : std::string(noun) + " '" + value + "'";
  };
  switch (kind) {
    case NodeKind::Query: return "query";
    case NodeKind::SelectClause: return "SELECT clause";
    case NodeKind::SelectItem: return "SELECT item";
    case NodeKind::FromClause: return "FROM clause";
    case NodeKind::TableRef: return with_value("table reference");
    case NodeKind::Join: return value.empty() ? "join" : value + " join";
    case NodeKind::JoinCondition: return "join condition";
    case NodeKind::WhereClause: return "WHERE clause";
    case NodeKind::GroupByClause: return "GROUP BY clause";
    case NodeKind::HavingClause: return "HAVING clause";
    case NodeKind::OrderByClause: return "ORDER BY clause";
    case NodeKind::OrderItem: return "ordering term";
    case NodeKind::LimitClause: return "LIMIT clause";
    case NodeKind::SetOp: return value.empty() ? "set operation" : value;
    case NodeKind::Subquery: return "subquery";
    case NodeKind::CaseExpr: return "CASE expression";
    case NodeKind::WhenArm: return "WHEN arm";
    case NodeKind::FunctionCall: return with_value("function call");
    case NodeKind::BinaryOp: return with_value("operator");
    case NodeKind::UnaryOp: return with_value("operator");
    case NodeKind::ColumnRef: return with_value("column reference");
    case NodeKind::Literal: return with_value("literal");
    case NodeKind::Alias: return with_value("alias");
    case NodeKind::Star: return with_value("star");
    case NodeKind::InList: return "IN list";
    case NodeKind::BetweenExpr: return "BETWEEN expression";
    case NodeKind::LikeExpr: return "LIKE expression";
    case NodeKind::IsNullExpr: return "IS NULL expression";
  }
  return "node";
}

std::string context_noun(NodeKind kind) {
  return kind == NodeKind::Query ? "the query" : kind_noun(kind, "");
}

std::string parent_noun(const EditOp& op) {
  if (op.parent.empty()) return "the statement root";
  const PathStep& last = op.parent.back();
  return kind_noun(last.kind, "");
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

const char* op_name(EditOpType t) {
  switch (t) {
    case EditOpType::Insert: return "insert";
    case EditOpType::Delete: return "delete";
    case EditOpType::Move: return "move";
    case EditOpType::Update: return "update";
  }
  return "?";
}

EditOpType op_from_name(const std::string& s) {
  if (s == "insert") return EditOpType::Insert;
  if (s == "delete") return EditOpType::Delete;
  if (s == "move") return EditOpType::Move;
  if (s == "update") return EditOpType::Update;
  throw Error("unknown edit op: " + s);
}

ordered_json path_to_json(const std::vector<PathStep>& path) {
  ordered_json arr = ordered_json::array();
  for (const PathStep& s : path)
    arr.push_back(ordered_json::array({s.index, kind_name(s.kind)}));
  return arr;
}

std::vector<PathStep> path_from_json(const ordered_json& arr) {
  std::vector<PathStep> path;
  for (const auto& e : arr)
    path.push_back({e.at(0).get<int>(), kind_from_name(e.at(1).get<std::string>())});
  return path;
}

}  // namespace

bool NodeMatching::has_source(int sid) const {
  for (auto& p : pairs)
    if (p.first == sid) return true;
  return false;
}

bool NodeMatching::has_target(int did) const {
  for (auto& p : pairs)
    if (p.second == did) return true;
  return false;
}

NodeMatching match_nodes(const SqlAst& src, const SqlAst& dst) {
  FlatTree S = flatten(src.root);
  FlatTree D = flatten(dst.root);
  std::vector<int> msrc, mdst;
  match_trees(S, D, msrc, mdst);
  NodeMatching m;
  for (int s = 0; s < S.count(); ++s)
    if (msrc[s] >= 0) m.pairs.emplace_back(s, msrc[s]);
  return m;
}

EditScript generate_edit_script(const SqlAst& src, const SqlAst& dst) {
  ScriptGenerator gen(src, dst);
  EditScript script = gen.run();
  script.source_fingerprint = canonical_fingerprint(src);
  script.target_fingerprint = canonical_fingerprint(dst);
  return script;
}

SqlAst apply_edit_script(const SqlAst& ast, const EditScript& script,
                         bool force) {
  if (!force) {
    std::string fp = canonical_fingerprint(ast);
    if (fp != script.source_fingerprint)
      throw FingerprintMismatch("tree fingerprint " + fp +
                                " does not match script source fingerprint " +
                                script.source_fingerprint);
  }
  auto work = make_virtual_root(ast.root);
  for (const EditOp& op : script.ops) apply_op(work.get(), op, force);
  if (work->ch.size() != 1)
    throw InvalidPosition("script did not produce a single statement root");
  SqlAst out;
  out.root = to_ast(*work->ch[0]);
  assign_preorder_ids(out.root);
  out.source = render_sql(out.root);
  return out;
}

std::string describe_edit_script(const EditScript& script) {
  if (script.ops.empty()) return "No changes required.";
  std::ostringstream out;
  int n = 0;
  for (const EditOp& op : script.ops) {
    if (n > 0) out << '\n';
    out << ++n << ". ";
    switch (op.type) {
      case EditOpType::Update:
        out << "Change " << kind_noun(op.kind, op.value) << " to '"
            << op.new_value << "' in " << context_noun(op.context) << ".";
        break;
      case EditOpType::Move:
        out << "Move " << kind_noun(op.kind, op.value) << " to position "
            << op.position << " under " << parent_noun(op) << ".";
        break;
      case EditOpType::Insert:
        out << "Insert " << kind_noun(op.kind, op.value) << " at position "
            << op.position << " under " << parent_noun(op) << ".";
        break;
      case EditOpType::Delete:
        out << "Delete " << kind_noun(op.kind, op.value) << " from "
            << context_noun(op.context) << ".";
        break;
    }
  }
  return out.str();
}

std::string script_to_json(const EditScript& script) {
  ordered_json j;
  j["source_fingerprint"] = script.source_fingerprint;
  j["target_fingerprint"] = script.target_fingerprint;
  ordered_json ops = ordered_json::array();
  for (const EditOp& op : script.ops) {
    ordered_json o;
    o["op"] = op_name(op.type);
    o["kind"] = kind_name(op.kind);
    o["value"] = op.value;
    if (op.type != EditOpType::Insert) o["path"] = path_to_json(op.path);
    if (op.type == EditOpType::Insert || op.type == EditOpType::Move) {
      o["parent"] = path_to_json(op.parent);
      o["position"] = op.position;
    }
    if (op.type == EditOpType::Update) o["new_value"] = op.new_value;
    o["context"] = kind_name(op.context);
    ops.push_back(std::move(o));
  }
  j["ops"] = std::move(ops);
  return j.dump();
}

EditScript script_from_json(const std::string& json_text) {
  ordered_json j = ordered_json::parse(json_text);
  EditScript script;
  script.source_fingerprint = j.at("source_fingerprint").get<std::string>();
  script.target_fingerprint = j.at("target_fingerprint").get<std::string>();
  for (const auto& o : j.at("ops")) {
    EditOp op;
    op.type = op_from_name(o.at("op").get<std::string>());
    op.kind = kind_from_name(o.at("kind").get<std::string>());
    op.value = o.at("value").get<std::string>();
    if (o.contains("path")) op.path = path_from_json(o.at("path"));
    if (o.contains("parent")) op.parent = path_from_json(o.at("parent"));
    if (o.contains("position")) op.position = o.at("position").get<int>();
    if (o.contains("new_value")) op.new_value = o.at("new_value").get<std::string>();
    if (o.contains("context"))
      op.context = kind_from_name(o.at("context").get<std::string>());
    script.ops.push_back(std::move(op));
  }
  return script;
}

}  // namespace sqlfix
