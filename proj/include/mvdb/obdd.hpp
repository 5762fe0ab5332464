#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvdb/error.hpp"
#include "mvdb/grounding.hpp"
#include "mvdb/relational.hpp"

namespace mvdb {

using Rank = std::uint32_t;
using NodeId = std::uint32_t;

inline constexpr Rank kSinkRank = std::numeric_limits<Rank>::max();
inline constexpr NodeId kFalse = 0;
inline constexpr NodeId kTrue = 1;

// Total order over the probabilistic tuples of an instance.
class VariableOrder {
 public:
  VariableOrder() = default;
  explicit VariableOrder(std::vector<TupleId> by_rank) : by_rank_(std::move(by_rank)) {
    for (Rank r = 0; r < by_rank_.size(); ++r) rank_.emplace(by_rank_[r], r);
  }

  std::size_t size() const { return by_rank_.size(); }
  TupleId tuple(Rank r) const { return by_rank_.at(r); }
  const std::vector<TupleId>& tuples() const { return by_rank_; }
  bool contains(TupleId t) const { return rank_.count(t) != 0; }
  Rank rank(TupleId t) const {
    auto it = rank_.find(t);
    if (it == rank_.end()) throw Error(ErrorCode::kPrecondition, "tuple has no rank in variable order");
    return it->second;
  }
  bool operator==(const VariableOrder& o) const { return by_rank_ == o.by_rank_; }

 private:
  std::vector<TupleId> by_rank_;
  std::unordered_map<TupleId, Rank> rank_;
};

struct ObddNode {
  Rank rank = kSinkRank;
  NodeId lo = 0;
  NodeId hi = 0;
};

// Shared node arena with a uniqueness table; every node it holds is reduced
// with respect to the owning order.
class ObddManager {
 public:
  explicit ObddManager(std::shared_ptr<const VariableOrder> order) : order_(std::move(order)) {
    nodes_.push_back({kSinkRank, kFalse, kFalse});
    nodes_.push_back({kSinkRank, kTrue, kTrue});
  }

  const VariableOrder& order() const { return *order_; }
  std::shared_ptr<const VariableOrder> order_ptr() const { return order_; }

  NodeId mk(Rank rank, NodeId lo, NodeId hi) {
    if (lo == hi) return lo;
    std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
    auto& level = unique_[rank];
    auto it = level.find(key);
    if (it != level.end()) return it->second;
    auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({rank, lo, hi});
    level.emplace(key, id);
    return id;
  }

  NodeId variable(Rank rank) { return mk(rank, kFalse, kTrue); }

  const ObddNode& node(NodeId id) const { return nodes_[id]; }
  Rank rank(NodeId id) const { return nodes_[id].rank; }
  static bool is_sink(NodeId id) { return id <= kTrue; }
  std::size_t arena_size() const { return nodes_.size(); }

 private:
  std::shared_ptr<const VariableOrder> order_;
  std::vector<ObddNode> nodes_;
  std::unordered_map<Rank, std::unordered_map<std::uint64_t, NodeId>> unique_;
};

// Handle onto a root inside a shared arena.
struct Obdd {
  std::shared_ptr<ObddManager> manager;
  NodeId root = kFalse;

  bool is_false() const { return root == kFalse; }
  bool is_true() const { return root == kTrue; }
};

enum class BoolOp { kAnd, kOr };

struct ObddMetrics {
  std::size_t size = 0;   // internal nodes
  std::size_t width = 0;  // max nodes at one level
  std::size_t levels = 0; // distinct variables
  Rank min_rank = kSinkRank;
  Rank max_rank = 0;
};

// Reachable internal nodes in DFS preorder (lo before hi).
inline std::vector<NodeId> reachable_nodes(const ObddManager& m, NodeId root) {
  std::vector<NodeId> out;
  if (ObddManager::is_sink(root)) return out;
  std::unordered_map<NodeId, bool> seen;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    if (ObddManager::is_sink(u) || !seen.emplace(u, true).second) continue;
    out.push_back(u);
    stack.push_back(m.node(u).hi);
    stack.push_back(m.node(u).lo);
  }
  return out;
}

inline ObddMetrics metrics(const Obdd& g) {
  ObddMetrics out;
  std::unordered_map<Rank, std::size_t> per_level;
  for (NodeId u : reachable_nodes(*g.manager, g.root)) {
    Rank r = g.manager->rank(u);
    ++out.size;
    out.width = std::max(out.width, ++per_level[r]);
    out.min_rank = std::min(out.min_rank, r);
    out.max_rank = std::max(out.max_rank, r);
  }
  out.levels = per_level.size();
  return out;
}

namespace detail {

inline void require_same_manager(const Obdd& a, const Obdd& b) {
  if (a.manager != b.manager && !(a.manager && b.manager && a.manager->order() == b.manager->order())) {
    throw Error(ErrorCode::kOrderMismatch, "OBDDs use different variable orders");
  }
  if (a.manager != b.manager) {
    throw Error(ErrorCode::kOrderMismatch, "OBDDs live in different node arenas");
  }
}

class Apply {
 public:
  Apply(ObddManager& m, BoolOp op) : m_(m), op_(op) {}

  NodeId run(NodeId a, NodeId b) {
    if (op_ == BoolOp::kAnd) {
      if (a == kFalse || b == kFalse) return kFalse;
      if (a == kTrue) return b;
      if (b == kTrue) return a;
    } else {
      if (a == kTrue || b == kTrue) return kTrue;
      if (a == kFalse) return b;
      if (b == kFalse) return a;
    }
    if (a == b) return a;
    if (a > b) std::swap(a, b);
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ++visits;
    const Rank ra = m_.rank(a);
    const Rank rb = m_.rank(b);
    const Rank r = std::min(ra, rb);
    NodeId a0 = ra == r ? m_.node(a).lo : a;
    NodeId a1 = ra == r ? m_.node(a).hi : a;
    NodeId b0 = rb == r ? m_.node(b).lo : b;
    NodeId b1 = rb == r ? m_.node(b).hi : b;
    NodeId lo = run(a0, b0);
    NodeId hi = run(a1, b1);
    NodeId out = m_.mk(r, lo, hi);
    memo_.emplace(key, out);
    return out;
  }

  std::size_t visits = 0;

 private:
  ObddManager& m_;
  BoolOp op_;
  std::unordered_map<std::uint64_t, NodeId> memo_;
};

// Reachable internal nodes sorted so that children come before parents.
inline std::vector<NodeId> bottom_up(const ObddManager& m, NodeId root) {
  auto nodes = reachable_nodes(m, root);
  std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) { return m.rank(a) > m.rank(b); });
  return nodes;
}

// Rebuilds the sub-DAG at `root` with each sink s replaced by map(s).
inline NodeId rebuild(ObddManager& m, NodeId root, NodeId on_false, NodeId on_true) {
  if (root == kFalse) return on_false;
  if (root == kTrue) return on_true;
  std::unordered_map<NodeId, NodeId> memo{{kFalse, on_false}, {kTrue, on_true}};
  for (NodeId u : bottom_up(m, root)) {
    const ObddNode n = m.node(u);
    memo[u] = m.mk(n.rank, memo.at(n.lo), memo.at(n.hi));
  }
  return memo.at(root);
}

inline Rank max_rank(const ObddManager& m, NodeId root) {
  Rank out = 0;
  for (NodeId u : reachable_nodes(m, root)) out = std::max(out, m.rank(u));
  return out;
}

}  // namespace detail

// Pairwise apply; `visits` receives the number of distinct node pairs expanded.
inline Obdd synthesize(BoolOp op, const Obdd& g1, const Obdd& g2, std::size_t* visits = nullptr) {
  detail::require_same_manager(g1, g2);
  detail::Apply apply(*g1.manager, op);
  NodeId root = apply.run(g1.root, g2.root);
  if (visits) *visits += apply.visits;
  return {g1.manager, root};
}

// Stacks g1 on top of g2 by redirecting g1's 0-sink (or) or 1-sink (and) to
// g2's root. Requires every variable of g1 to precede every variable of g2.
inline Obdd concatenate(BoolOp op, const Obdd& g1, const Obdd& g2) {
  detail::require_same_manager(g1, g2);
  auto& m = *g1.manager;
  const NodeId absorbing = op == BoolOp::kOr ? kTrue : kFalse;
  const NodeId neutral = op == BoolOp::kOr ? kFalse : kTrue;
  if (g1.root == absorbing || g2.root == absorbing) return {g1.manager, absorbing};
  if (g1.root == neutral) return g2;
  if (g2.root == neutral) return g1;
  if (detail::max_rank(m, g1.root) >= m.rank(g2.root)) {
    throw Error(ErrorCode::kPrecondition, "concatenation refused: variables of the operands interleave");
  }
  return op == BoolOp::kOr ? Obdd{g1.manager, detail::rebuild(m, g1.root, g2.root, kTrue)}
                          : Obdd{g1.manager, detail::rebuild(m, g1.root, kFalse, g2.root)};
}

// Complement by exchanging the sinks.
inline Obdd negate(const Obdd& g) { return {g.manager, detail::rebuild(*g.manager, g.root, kTrue, kFalse)}; }

inline Obdd constant(const std::shared_ptr<ObddManager>& m, bool value) { return {m, value ? kTrue : kFalse}; }

// OBDD of a monotone DNF under the manager's order: one chain per clause,
// combined by balanced synthesis.
inline Obdd from_lineage(const Lineage& phi, const std::shared_ptr<ObddManager>& m, std::size_t* visits = nullptr) {
  if (phi.is_true()) return constant(m, true);
  std::vector<NodeId> parts;
  for (const auto& clause : phi.clauses) {
    std::vector<Rank> ranks;
    for (TupleId t : clause) ranks.push_back(m->order().rank(t));
    std::sort(ranks.begin(), ranks.end(), std::greater<>());
    NodeId acc = kTrue;
    for (Rank r : ranks) acc = m->mk(r, kFalse, acc);
    parts.push_back(acc);
  }
  if (parts.empty()) return constant(m, false);
  while (parts.size() > 1) {
    std::vector<NodeId> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(synthesize(BoolOp::kOr, {m, parts[i]}, {m, parts[i + 1]}, visits).root);
    }
    if (parts.size() % 2) next.push_back(parts.back());
    parts = std::move(next);
  }
  return {m, parts.front()};
}

// Bottom-up Shannon expansion; `prob(rank)` may be negative.
template <typename ProbFn>
double shannon_probability(const ObddManager& m, NodeId root, ProbFn&& prob) {
  if (root == kFalse) return 0.0;
  if (root == kTrue) return 1.0;
  std::unordered_map<NodeId, double> value{{kFalse, 0.0}, {kTrue, 1.0}};
  for (NodeId u : detail::bottom_up(m, root)) {
    const ObddNode& n = m.node(u);
    double p = prob(n.rank);
    value[u] = (1.0 - p) * value.at(n.lo) + p * value.at(n.hi);
  }
  return value.at(root);
}

template <typename ProbFn>
double shannon_probability(const Obdd& g, ProbFn&& prob) {
  return shannon_probability(*g.manager, g.root, std::forward<ProbFn>(prob));
}

// Truth value under an assignment by rank.
template <typename AssignFn>
bool evaluate(const Obdd& g, AssignFn&& value_of) {
  NodeId u = g.root;
  while (!ObddManager::is_sink(u)) {
    const auto& n = g.manager->node(u);
    u = value_of(n.rank) ? n.hi : n.lo;
  }
  return u == kTrue;
}

// `id var lo hi` per node, then `root id` and `order v1 v2 ...`.
inline void dump(std::ostream& os, const Obdd& g, const std::function<std::string(TupleId)>& name = {}) {
  const auto& m = *g.manager;
  for (NodeId u : reachable_nodes(m, g.root)) {
    const auto& n = m.node(u);
    os << u << ' ' << n.rank << ' ' << n.lo << ' ' << n.hi << '\n';
  }
  os << "root " << g.root << '\n';
  os << "order";
  for (TupleId t : m.order().tuples()) os << ' ' << (name ? name(t) : std::to_string(t));
  os << '\n';
}

}  // namespace mvdb
