#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mvdb/compile.hpp"
#include "mvdb/translate.hpp"

namespace mvdb {

// Child codes inside a DfsLayout; anything else is a node index.
inline constexpr std::uint32_t kLayoutFalse = 0xFFFFFFFEu;
inline constexpr std::uint32_t kLayoutTrue = 0xFFFFFFFFu;

inline bool is_layout_sink(std::uint32_t u) { return u >= kLayoutFalse; }

struct LayoutNode {
  Rank rank = 0;
  std::uint32_t lo = kLayoutFalse;
  std::uint32_t hi = kLayoutFalse;
  double prob_under = 0;
  double reach = 0;
};

struct CutEntry {
  std::uint32_t node = 0;
  double mass = 0;
};

// One level of a constituent: its intra-index slice and the cut just above it.
struct Level {
  Rank rank = 0;
  std::uint32_t nodes_begin = 0, nodes_end = 0;    // into Constituent::intra
  std::uint32_t entries_begin = 0, entries_end = 0;  // into Constituent::entries
  double true_mass = 0;  // mass reaching the 1-sink from above the cut
  bool clean = false;    // every path crosses this level through a node on it
};

// Augmented OBDD of one negated constituent of W, in DFS preorder.
struct Constituent {
  std::vector<ConstId> keys;  // separator constants; empty when W has none
  std::vector<Value> key_values;
  std::vector<LayoutNode> nodes;
  std::uint32_t root = kLayoutTrue;  // 0 or a sink code
  Rank min_rank = kSinkRank;
  Rank max_rank = 0;
  std::size_t width = 0;
  std::vector<Level> levels;
  std::vector<std::uint32_t> intra;
  std::vector<CutEntry> entries;

  double prob_under(std::uint32_t u) const {
    if (u == kLayoutFalse) return 0;
    if (u == kLayoutTrue) return 1;
    return nodes[u].prob_under;
  }
  double root_probability() const { return prob_under(root); }
  std::size_t size() const { return nodes.size(); }

  const Level* level_at_or_after(Rank r) const {
    auto it = std::lower_bound(levels.begin(), levels.end(), r, [](const Level& l, Rank x) { return l.rank < x; });
    return it == levels.end() ? nullptr : &*it;
  }
};

// Instance-independent name of a tuple, used to persist the order.
struct TupleKey {
  std::string relation;
  std::vector<Value> values;
  bool operator==(const TupleKey&) const = default;
};

inline TupleKey tuple_key(const Instance& inst, TupleId t) {
  const auto& rec = inst.tuple(t);
  TupleKey k{inst.schema().relation(rec.relation).name, {}};
  for (ConstId c : rec.values) k.values.push_back(inst.dictionary().value(c));
  return k;
}

struct MvIndex {
  std::shared_ptr<const VariableOrder> order;
  std::vector<TupleKey> order_keys;  // by rank
  std::vector<double> prob;  // P0 per rank
  PermutationSet pi;
  std::uint64_t schema_digest = 0;
  double p0_w = 0;
  double p0_not_w = 1;
  std::vector<Constituent> constituents;           // ascending, disjoint rank ranges
  std::vector<std::pair<Rank, std::uint32_t>> inter;  // rank -> constituent

  std::optional<std::uint32_t> constituent_of(Rank r) const {
    auto it = std::lower_bound(inter.begin(), inter.end(), std::make_pair(r, std::uint32_t{0}));
    if (it == inter.end() || it->first != r) return std::nullopt;
    return it->second;
  }

  // Any constituent with probUnder 0 makes P0(not W) = 0.
  bool inconsistent() const {
    for (const auto& c : constituents)
      if (c.root_probability() == 0) return true;
    return false;
  }
};

// FNV-1a over relation names, attribute types and kinds.
inline std::uint64_t schema_digest(const Schema& s) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view bytes) {
    for (unsigned char ch : bytes) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  for (const auto& r : s.relations()) {
    mix(r.name);
    for (const auto& a : r.attributes) mix(a.name + (a.type == AttrType::kInt ? ":int" : ":string"));
    mix(std::to_string(static_cast<int>(r.kind)));
  }
  return h;
}

struct BuildStats {
  CompileStats compile;
  std::size_t merged = 0;  // constituents merged because their ranges overlapped
};

namespace detail {

inline Constituent make_constituent(const ObddManager& m, NodeId root, const std::vector<double>& prob) {
  Constituent c;
  if (root == kFalse) {
    c.root = kLayoutFalse;
    return c;
  }
  if (root == kTrue) {
    c.root = kLayoutTrue;
    return c;
  }
  auto pre = reachable_nodes(m, root);
  std::unordered_map<NodeId, std::uint32_t> index;
  for (std::uint32_t i = 0; i < pre.size(); ++i) index.emplace(pre[i], i);
  auto code = [&](NodeId u) { return u == kFalse ? kLayoutFalse : u == kTrue ? kLayoutTrue : index.at(u); };
  c.root = 0;
  c.nodes.resize(pre.size());
  for (std::uint32_t i = 0; i < pre.size(); ++i) {
    const auto& n = m.node(pre[i]);
    c.nodes[i] = {n.rank, code(n.lo), code(n.hi), 0, 0};
  }
  std::vector<std::uint32_t> by_rank(pre.size());
  for (std::uint32_t i = 0; i < by_rank.size(); ++i) by_rank[i] = i;
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return c.nodes[a].rank < c.nodes[b].rank; });
  // probUnder bottom-up, reachability top-down
  for (auto it = by_rank.rbegin(); it != by_rank.rend(); ++it) {
    auto& n = c.nodes[*it];
    double p = prob[n.rank];
    n.prob_under = (1 - p) * c.prob_under(n.lo) + p * c.prob_under(n.hi);
  }
  c.nodes[0].reach = 1;
  for (std::uint32_t u : by_rank) {
    const auto& n = c.nodes[u];
    double p = prob[n.rank];
    if (!is_layout_sink(n.lo)) c.nodes[n.lo].reach += n.reach * (1 - p);
    if (!is_layout_sink(n.hi)) c.nodes[n.hi].reach += n.reach * p;
  }
  c.intra = by_rank;
  c.min_rank = c.nodes[by_rank.front()].rank;
  c.max_rank = c.nodes[by_rank.back()].rank;

  // levels and the cut table, sweeping the cut downwards
  std::map<std::uint32_t, double> frontier{{0, 1.0}};
  double true_mass = 0;
  bool false_hit = false;
  std::size_t i = 0;
  while (i < by_rank.size()) {
    Level lv;
    lv.rank = c.nodes[by_rank[i]].rank;
    lv.nodes_begin = static_cast<std::uint32_t>(i);
    while (i < by_rank.size() && c.nodes[by_rank[i]].rank == lv.rank) ++i;
    lv.nodes_end = static_cast<std::uint32_t>(i);
    c.width = std::max<std::size_t>(c.width, lv.nodes_end - lv.nodes_begin);
    lv.entries_begin = static_cast<std::uint32_t>(c.entries.size());
    bool all_on_level = true;
    for (const auto& [u, mass] : frontier) {
      c.entries.push_back({u, mass});
      if (c.nodes[u].rank != lv.rank) all_on_level = false;
    }
    lv.entries_end = static_cast<std::uint32_t>(c.entries.size());
    lv.true_mass = true_mass;
    lv.clean = all_on_level && true_mass == 0 && !false_hit;
    for (std::uint32_t k = lv.nodes_begin; k < lv.nodes_end; ++k) {
      std::uint32_t u = by_rank[k];
      auto f = frontier.find(u);
      double mass = f->second;
      frontier.erase(f);
      const auto& n = c.nodes[u];
      double p = prob[n.rank];
      for (auto [child, factor] : {std::pair{n.lo, 1 - p}, std::pair{n.hi, p}}) {
        if (child == kLayoutTrue) true_mass += mass * factor;
        else if (child == kLayoutFalse) false_hit = true;
        else frontier[child] += mass * factor;
      }
    }
    c.levels.push_back(lv);
  }
  return c;
}

inline std::set<ConstId> separator_constants(const Ucq& w, const Separator& sep, const Instance& inst) {
  std::set<ConstId> out;
  for (std::size_t d = 0; d < w.disjuncts.size(); ++d) {
    const auto& cq = w.disjuncts[d];
    std::optional<std::set<ConstId>> acc;
    for (const auto& a : cq.atoms) {
      auto pos = positions_of(a, sep.var_per_disjunct[d]);
      if (pos.empty()) continue;
      std::set<ConstId> col;
      for (TupleId t : inst.relation_tuples(a.relation)) col.insert(inst.tuple(t).values[pos.front()]);
      if (!acc) {
        acc = std::move(col);
        continue;
      }
      std::set<ConstId> both;
      std::set_intersection(acc->begin(), acc->end(), col.begin(), col.end(), std::inserter(both, both.end()));
      acc = std::move(both);
    }
    if (acc) out.insert(acc->begin(), acc->end());
  }
  return out;
}

}  // namespace detail

// Compiles W into its MV-index. `manager` receives the arena used, so that
// query OBDDs can share it.
inline MvIndex build_index(const TranslationResult& tr, std::shared_ptr<ObddManager>* manager = nullptr,
                           BuildStats* stats = nullptr) {
  BuildStats local;
  BuildStats& st = stats ? *stats : local;
  const Instance& inst = tr.indb;
  MvIndex idx;
  idx.pi = tr.w.disjuncts.empty() ? PermutationSet::identity(inst.schema()) : choose_pi(tr.w, inst.schema());
  idx.order = std::make_shared<const VariableOrder>(tuple_order(inst, idx.pi));
  idx.schema_digest = schema_digest(inst.schema());
  for (Rank r = 0; r < idx.order->size(); ++r) {
    idx.prob.push_back(inst.probability(idx.order->tuple(r)));
    idx.order_keys.push_back(tuple_key(inst, idx.order->tuple(r)));
  }
  auto m = std::make_shared<ObddManager>(idx.order);
  if (manager) *manager = m;

  struct Piece {
    std::vector<ConstId> keys;
    Obdd g;
    Rank lo, hi;
  };
  std::vector<Piece> pieces;
  auto add_piece = [&](std::vector<ConstId> keys, Obdd g) {
    if (g.is_false()) return;
    ObddMetrics mt = metrics(g);
    pieces.push_back({std::move(keys), g, mt.min_rank, mt.max_rank});
  };
  if (!tr.w.disjuncts.empty()) {
    auto sep = find_separator(tr.w, &inst.schema());
    if (sep) {
      for (ConstId c : detail::separator_constants(tr.w, *sep, inst)) {
        Ucq sub;
        sub.name = tr.w.name;
        for (std::size_t d = 0; d < tr.w.disjuncts.size(); ++d)
          sub.disjuncts.push_back(substitute_var(tr.w.disjuncts[d], sep->var_per_disjunct[d], c));
        add_piece({c}, con_obdd(sub, inst, m, &st.compile));
      }
    } else {
      add_piece({}, con_obdd(tr.w, inst, m, &st.compile));
    }
  }
  // a sink-1 piece has no variables; keep it first
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    bool ta = a.g.is_true(), tb = b.g.is_true();
    if (ta != tb) return ta;
    return a.lo < b.lo;
  });
  std::vector<Piece> chain;
  for (auto& p : pieces) {
    if (!chain.empty() && !p.g.is_true() && !chain.back().g.is_true() && p.lo <= chain.back().hi) {
      auto& b = chain.back();
      b.g = synthesize(BoolOp::kOr, b.g, p.g, &st.compile.apply_visits);
      b.keys.insert(b.keys.end(), p.keys.begin(), p.keys.end());
      b.hi = std::max(b.hi, p.hi);
      ++st.merged;
      continue;
    }
    chain.push_back(std::move(p));
  }
  idx.p0_not_w = 1;
  for (auto& p : chain) {
    Constituent c = detail::make_constituent(*m, negate(p.g).root, idx.prob);
    c.keys = std::move(p.keys);
    for (ConstId k : c.keys) c.key_values.push_back(inst.dictionary().value(k));
    idx.p0_not_w *= c.root_probability();
    auto id = static_cast<std::uint32_t>(idx.constituents.size());
    for (const auto& lv : c.levels) idx.inter.emplace_back(lv.rank, id);
    idx.constituents.push_back(std::move(c));
  }
  std::sort(idx.inter.begin(), idx.inter.end());
  idx.p0_w = 1 - idx.p0_not_w;
  return idx;
}

struct IntersectStats {
  std::size_t visited = 0;   // distinct W nodes expanded
  std::size_t memo = 0;      // memo entries
  std::size_t max_stack = 0;
  Rank rmin = kSinkRank, rmax = 0;
};

namespace detail {

// P0(Q and not W) with the probUnder of constituents that Q never touches
// factored out; `scale` holds that product.
class Intersect {
 public:
  Intersect(const Obdd& gq, const MvIndex& idx) : m_(*gq.manager), idx_(idx), q_root_(gq.root) {
    if (gq.manager->order_ptr() != idx.order && !(gq.manager->order() == *idx.order)) {
      throw Error(ErrorCode::kOrderMismatch, "query OBDD is not ordered by the index order");
    }
    const std::size_t k = idx.constituents.size();
    base_.resize(k + 1, 0);
    for (std::size_t c = 0; c < k; ++c) base_[c + 1] = base_[c] + static_cast<std::uint32_t>(idx.constituents[c].size());
    touched_.assign(k, false);
    for (NodeId u : reachable_nodes(m_, q_root_)) {
      Rank r = m_.rank(u);
      stats.rmin = std::min(stats.rmin, r);
      stats.rmax = std::max(stats.rmax, r);
    }
    for (std::size_t c = 0; c < k; ++c) {
      const auto& con = idx.constituents[c];
      touched_[c] = con.size() && con.min_rank <= stats.rmax && con.max_rank >= stats.rmin &&
                    has_query_var(con.min_rank, con.max_rank);
    }
    suffix_.assign(k + 1, 1.0);
    for (std::size_t c = k; c-- > 0;) suffix_[c] = suffix_[c + 1] * factor(c);
    scale = 1;
    for (std::size_t c = 0; c < k; ++c)
      if (!touched_[c]) scale *= idx.constituents[c].root_probability();
  }

  double scale = 1;
  IntersectStats stats;

  // touched constituents' product, i.e. the matching denominator
  double denominator() const { return suffix_.empty() ? 1.0 : suffix_[0]; }

  double mv() {
    if (idx_.constituents.empty()) return pq(q_root_);
    return run_stack(q_root_, 0, idx_.constituents[0].root);
  }

  double cc() {
    const auto& cs = idx_.constituents;
    if (q_root_ == kFalse) return 0;
    if (q_root_ == kTrue || cs.empty()) return q_root_ == kTrue ? suffix_[0] : pq(q_root_);
    const Rank rmin = m_.rank(q_root_);
    auto it = std::lower_bound(cs.begin(), cs.end(), rmin, [](const Constituent& c, Rank r) { return c.max_rank < r; });
    if (it == cs.end()) return pq(q_root_);
    const auto c0 = static_cast<std::uint32_t>(it - cs.begin());
    const Constituent& con = *it;
    if (is_layout_sink(con.root)) return f_rec(q_root_, c0, con.root);
    const Level* lv = con.level_at_or_after(rmin);
    double sum = 0;
    for (std::uint32_t e = lv->entries_begin; e < lv->entries_end; ++e) {
      const auto& en = con.entries[e];
      sum += en.mass * f_rec(q_root_, c0, en.node);
    }
    if (lv->true_mass != 0) sum += lv->true_mass * f_rec(q_root_, c0, kLayoutTrue);
    return sum;
  }

 private:
  bool has_query_var(Rank lo, Rank hi) const {
    for (NodeId u : reachable_nodes(m_, q_root_)) {
      Rank r = m_.rank(u);
      if (r >= lo && r <= hi) return true;
    }
    return false;
  }

  double factor(std::size_t c) const { return touched_[c] ? idx_.constituents[c].root_probability() : 1.0; }

  double pq(NodeId q) {
    return shannon_probability(m_, q, [&](Rank r) { return idx_.prob[r]; });
  }

  struct State {
    bool done = false;
    double value = 0;  // final value when done
    double factor = 1;
    NodeId q = kFalse;
    std::uint32_t c = 0, u = 0;
  };

  // Resolves sinks, constituent hand-off and Q-independent stretches.
  State normalize(NodeId q, std::uint32_t c, std::uint32_t u) {
    State s;
    const std::size_t k = idx_.constituents.size();
    for (;;) {
      if (q == kFalse || u == kLayoutFalse) {
        s.done = true;
        s.value = 0;
        return s;
      }
      if (u == kLayoutTrue) {
        if (++c == k) {
          s.done = true;
          s.value = s.factor * pq(q);
          return s;
        }
        u = idx_.constituents[c].root;
        continue;
      }
      const Constituent& con = idx_.constituents[c];
      if (q == kTrue) {
        s.done = true;
        s.value = s.factor * (touched_[c] ? con.prob_under(u) : 1.0) * suffix_[c + 1];
        return s;
      }
      if (m_.rank(q) > con.max_rank) {
        s.factor *= touched_[c] ? con.prob_under(u) : 1.0;
        u = kLayoutTrue;
        continue;
      }
      s.q = q;
      s.c = c;
      s.u = u;
      return s;
    }
  }

  std::uint64_t key(NodeId q, std::uint32_t c, std::uint32_t u) const {
    return (static_cast<std::uint64_t>(q) << 32) | (base_[c] + u);
  }

  struct Split {
    double p;
    NodeId q0, q1;
    std::uint32_t u0, u1;
  };

  Split split(NodeId q, std::uint32_t c, std::uint32_t u) {
    const auto& n = idx_.constituents[c].nodes[u];
    const Rank rq = m_.rank(q);
    const Rank r = std::min(rq, n.rank);
    Split s{idx_.prob[r], q, q, u, u};
    if (rq == r) {
      s.q0 = m_.node(q).lo;
      s.q1 = m_.node(q).hi;
    }
    if (n.rank == r) {
      s.u0 = n.lo;
      s.u1 = n.hi;
      if (expanded_.insert(base_[c] + u).second) ++stats.visited;
    }
    return s;
  }

  double f_rec(NodeId q0, std::uint32_t c0, std::uint32_t u0) {
    State s = normalize(q0, c0, u0);
    if (s.done) return s.value;
    auto k = key(s.q, s.c, s.u);
    auto it = memo_.find(k);
    if (it != memo_.end()) return s.factor * it->second;
    Split sp = split(s.q, s.c, s.u);
    double v = (1 - sp.p) * f_rec(sp.q0, s.c, sp.u0) + sp.p * f_rec(sp.q1, s.c, sp.u1);
    memo_.emplace(k, v);
    stats.memo = memo_.size();
    return s.factor * v;
  }

  // Iterative co-traversal; the Q side lives on a run-length stack since a
  // query node is pushed repeatedly while only the W side advances.
  double run_stack(NodeId q_start, std::uint32_t c_start, std::uint32_t u_start) {
    struct Frame {
      std::uint32_t c, u;
      std::uint64_t key;
      double factor;
      Split sp;
      int phase;  // 0 = lo pending, 1 = hi pending
      double lo_value;
    };
    std::vector<Frame> frames;
    std::vector<std::pair<NodeId, std::uint32_t>> qstack;
    auto push_q = [&](NodeId q) {
      if (!qstack.empty() && qstack.back().first == q) ++qstack.back().second;
      else qstack.emplace_back(q, 1);
    };
    auto pop_q = [&] {
      if (--qstack.back().second == 0) qstack.pop_back();
    };

    double ret = 0;
    // returns true if the state needs a frame
    auto enter = [&](NodeId q, std::uint32_t c, std::uint32_t u) {
      State s = normalize(q, c, u);
      if (s.done) {
        ret = s.value;
        return false;
      }
      auto k = key(s.q, s.c, s.u);
      auto it = memo_.find(k);
      if (it != memo_.end()) {
        ret = s.factor * it->second;
        return false;
      }
      push_q(s.q);
      frames.push_back({s.c, s.u, k, s.factor, split(s.q, s.c, s.u), 0, 0});
      stats.max_stack = std::max(stats.max_stack, frames.size());
      return true;
    };

    if (!enter(q_start, c_start, u_start)) return ret;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.phase == 0) {
        f.phase = 1;
        if (enter(f.sp.q0, f.c, f.sp.u0)) continue;
        frames.back().lo_value = ret;
        continue;
      }
      if (f.phase == 1) {
        f.phase = 2;
        if (enter(f.sp.q1, f.c, f.sp.u1)) continue;
      }
      // both children resolved; the hi value is in ret
      Frame& g = frames.back();
      double v = (1 - g.sp.p) * g.lo_value + g.sp.p * ret;
      memo_.emplace(g.key, v);
      stats.memo = memo_.size();
      ret = g.factor * v;
      frames.pop_back();
      pop_q();
      if (!frames.empty()) {
        Frame& parent = frames.back();
        if (parent.phase == 1) parent.lo_value = ret;
      }
    }
    return ret;
  }

  const ObddManager& m_;
  const MvIndex& idx_;
  NodeId q_root_;
  std::vector<std::uint32_t> base_;
  std::vector<bool> touched_;
  std::vector<double> suffix_;
  std::unordered_map<std::uint64_t, double> memo_;
  std::unordered_set<std::uint32_t> expanded_;
};

}  // namespace detail

// P0(Q and not W) for a query OBDD ordered by the index order.
inline double mv_intersect(const Obdd& gq, const MvIndex& idx, IntersectStats* stats = nullptr) {
  detail::Intersect x(gq, idx);
  double v = x.mv() * x.scale;
  if (stats) *stats = x.stats;
  return v;
}

inline double cc_mv_intersect(const Obdd& gq, const MvIndex& idx, IntersectStats* stats = nullptr) {
  detail::Intersect x(gq, idx);
  double v = x.cc() * x.scale;
  if (stats) *stats = x.stats;
  return v;
}

// P0(X and not W) for a single tuple variable.
inline double point_probability(TupleId x, const MvIndex& idx, const std::shared_ptr<ObddManager>& m) {
  if (!idx.order->contains(x)) throw Error(ErrorCode::kPrecondition, "tuple is not probabilistic");
  const Rank r = idx.order->rank(x);
  auto ci = idx.constituent_of(r);
  if (!ci) return idx.prob[r] * idx.p0_not_w;
  const Constituent& con = idx.constituents[*ci];
  const Level* lv = con.level_at_or_after(r);
  if (!lv || lv->rank != r || !lv->clean) return mv_intersect({m, m->variable(r)}, idx);
  double sum = 0;
  for (std::uint32_t i = lv->nodes_begin; i < lv->nodes_end; ++i) {
    const auto& n = con.nodes[con.intra[i]];
    sum += n.reach * con.prob_under(n.hi);
  }
  double others = 1;
  for (std::size_t c = 0; c < idx.constituents.size(); ++c)
    if (c != *ci) others *= idx.constituents[c].root_probability();
  return idx.prob[r] * sum * others;
}

enum class Engine { kMv, kCcMv, kOracle };

struct QueryTiming {
  double lineage_us = 0;
  double obdd_us = 0;
  double intersect_us = 0;
};

// Evaluator over a compiled index; the query OBDD shares the index order.
class MvEvaluator : public Evaluator {
 public:
  MvEvaluator(const TranslationResult& tr, const MvIndex& idx, Engine engine)
      : tr_(tr), idx_(idx), engine_(engine), m_(std::make_shared<ObddManager>(idx.order)) {}

  QueryMass evaluate(const Ucq& q) override {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    Lineage phi = lineage(q, tr_.indb);
    auto t1 = clock::now();
    Obdd gq = from_lineage(phi, m_);
    auto t2 = clock::now();
    detail::Intersect x(gq, idx_);
    QueryMass out;
    out.numerator = engine_ == Engine::kMv ? x.mv() : x.cc();
    out.denominator = idx_.inconsistent() ? 0.0 : x.denominator();
    auto t3 = clock::now();
    last_stats = x.stats;
    auto us = [](auto a, auto b) { return std::chrono::duration<double, std::micro>(b - a).count(); };
    last_timing = {us(t0, t1), us(t1, t2), us(t2, t3)};
    return out;
  }

  double p0_not_w() override { return idx_.p0_not_w; }

  const std::shared_ptr<ObddManager>& manager() const { return m_; }

  IntersectStats last_stats;
  QueryTiming last_timing;

 private:
  const TranslationResult& tr_;
  const MvIndex& idx_;
  Engine engine_;
  std::shared_ptr<ObddManager> m_;
};

}  // namespace mvdb
