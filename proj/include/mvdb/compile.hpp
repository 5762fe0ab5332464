#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "mvdb/analysis.hpp"
#include "mvdb/grounding.hpp"
#include "mvdb/obdd.hpp"

namespace mvdb {

// Pi: probabilistic tuples sorted by their permuted value sequences under
// the active-domain (interning) order; a proper prefix sorts first, ties
// fall back to the schema's arity order.
inline VariableOrder tuple_order(const Instance& inst, const PermutationSet& pi) {
  const auto rel_order = inst.schema().arity_order();
  std::vector<std::size_t> rel_pos(inst.schema().size());
  for (std::size_t i = 0; i < rel_order.size(); ++i) rel_pos[rel_order[i]] = i;

  struct Key {
    std::vector<std::uint32_t> seq;
    std::size_t rel;
    TupleId id;
  };
  std::vector<Key> keys;
  for (TupleId t : inst.probabilistic_tuples()) {
    const auto& rec = inst.tuple(t);
    Key k{{}, rel_pos[rec.relation], t};
    for (std::size_t p : pi.of(rec.relation)) k.seq.push_back(rec.values[p]);
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.seq != b.seq) return a.seq < b.seq;
    if (a.rel != b.rel) return a.rel < b.rel;
    return a.id < b.id;
  });
  std::vector<TupleId> by_rank;
  by_rank.reserve(keys.size());
  for (const auto& k : keys) by_rank.push_back(k.id);
  return VariableOrder(std::move(by_rank));
}

struct CompileStats {
  std::size_t concatenations = 0;
  std::size_t syntheses = 0;
  std::size_t refusals = 0;  // concatenations that fell back to synthesis
  std::size_t expansions = 0;
  std::size_t apply_visits = 0;
};

namespace detail {

class ConObdd {
 public:
  ConObdd(const Instance& inst, std::shared_ptr<ObddManager> m, CompileStats& stats)
      : inst_(inst), m_(std::move(m)), stats_(stats) {}

  Obdd build(std::vector<ConjunctiveQuery> ds) {
    std::vector<ConjunctiveQuery> open;
    std::vector<Obdd> closed;
    for (auto& cq : ds) {
      if (has_missing_constant(cq)) continue;
      if (!settled(cq)) {
        open.push_back(std::move(cq));
        continue;
      }
      Obdd g = from_lineage(lineage(cq, inst_), m_, &stats_.apply_visits);
      if (g.is_true()) return g;
      if (!g.is_false()) closed.push_back(g);
    }
    if (!open.empty()) closed.push_back(build_open(std::move(open)));
    return combine(BoolOp::kOr, std::move(closed), false);
  }

 private:
  bool structural(const Atom& a) const { return counts_for_structure(a, &inst_.schema()); }

  static bool has_missing_constant(const ConjunctiveQuery& cq) {
    for (const auto& a : cq.atoms)
      for (const auto& t : a.args)
        if (!t.is_var() && t.id == kMissingConst) return true;
    return false;
  }

  // Every probabilistic atom ground: the lineage is at most one clause.
  bool settled(const ConjunctiveQuery& cq) const {
    for (const auto& a : cq.atoms)
      if (structural(a) && !atom_is_ground(a)) return false;
    return true;
  }

  Obdd build_open(std::vector<ConjunctiveQuery> ds) {
    if (auto sep = find_separator(ds, &inst_.schema())) return by_separator(ds, *sep);
    if (ds.size() > 1) {
      auto groups = relation_groups(ds);
      if (groups.size() > 1) {
        std::vector<Obdd> parts;
        for (const auto& g : groups) {
          std::vector<ConjunctiveQuery> sub;
          for (std::size_t i : g) sub.push_back(ds[i]);
          parts.push_back(build(std::move(sub)));
        }
        return combine(BoolOp::kOr, std::move(parts), true);
      }
      return expand(ds);
    }
    auto comps = components(ds.front());
    if (comps.size() > 1) {
      std::vector<Obdd> parts;
      for (auto& c : comps) {
        Obdd g = build({c});
        if (g.is_false()) return g;
        parts.push_back(g);
      }
      return combine(BoolOp::kAnd, std::move(parts), true);
    }
    return expand(ds);
  }

  // Values found at `pos` of some tuple of relation `rel`.
  std::set<ConstId> column(RelId rel, std::size_t pos) const {
    std::set<ConstId> out;
    for (TupleId t : inst_.relation_tuples(rel)) out.insert(inst_.tuple(t).values[pos]);
    return out;
  }

  // Constants v can take: the intersection over the atoms mentioning v.
  std::set<ConstId> domain_of(const ConjunctiveQuery& cq, VarId v, bool structural_only) const {
    std::optional<std::set<ConstId>> acc;
    for (const auto& a : cq.atoms) {
      if (structural_only && !structural(a)) continue;
      auto pos = positions_of(a, v);
      if (pos.empty()) continue;
      auto col = column(a.relation, pos.front());
      if (!acc) {
        acc = std::move(col);
        continue;
      }
      std::set<ConstId> both;
      std::set_intersection(acc->begin(), acc->end(), col.begin(), col.end(), std::inserter(both, both.end()));
      acc = std::move(both);
    }
    return acc.value_or(std::set<ConstId>{});
  }

  // R3: one independent piece per separator constant.
  Obdd by_separator(const std::vector<ConjunctiveQuery>& ds, const Separator& sep) {
    std::set<ConstId> consts;
    for (std::size_t d = 0; d < ds.size(); ++d) {
      auto dom = domain_of(ds[d], sep.var_per_disjunct[d], false);
      consts.insert(dom.begin(), dom.end());
    }
    std::vector<Obdd> parts;
    for (ConstId c : consts) {
      std::vector<ConjunctiveQuery> sub;
      for (std::size_t d = 0; d < ds.size(); ++d) sub.push_back(substitute_var(ds[d], sep.var_per_disjunct[d], c));
      Obdd g = build(std::move(sub));
      if (g.is_true()) return g;
      if (!g.is_false()) parts.push_back(g);
    }
    return combine(BoolOp::kOr, std::move(parts), true);
  }

  // Shannon-style expansion on the variable in the most probabilistic atoms.
  Obdd expand(const std::vector<ConjunctiveQuery>& ds) {
    std::size_t best_d = 0;
    VarId best_v = 0;
    std::size_t best_count = 0;
    std::size_t best_dom = 0;
    std::set<ConstId> best_domain;
    for (std::size_t d = 0; d < ds.size(); ++d) {
      std::map<VarId, std::size_t> count;
      for (const auto& a : ds[d].atoms)
        if (structural(a))
          for (VarId v : atom_vars(a)) ++count[v];
      for (const auto& [v, n] : count) {
        if (n < best_count) continue;
        auto dom = domain_of(ds[d], v, false);
        if (n > best_count || dom.size() < best_dom) {
          best_d = d;
          best_v = v;
          best_count = n;
          best_dom = dom.size();
          best_domain = std::move(dom);
        }
      }
    }
    ++stats_.expansions;
    std::vector<ConjunctiveQuery> rest;
    for (std::size_t d = 0; d < ds.size(); ++d)
      if (d != best_d) rest.push_back(ds[d]);
    std::vector<Obdd> parts;
    if (!rest.empty()) parts.push_back(build(rest));
    for (ConstId c : best_domain) {
      Obdd g = build({substitute_var(ds[best_d], best_v, c)});
      if (g.is_true()) return g;
      if (!g.is_false()) parts.push_back(g);
    }
    return combine(BoolOp::kOr, std::move(parts), false);
  }

  // Folds parts with op. Concatenation is attempted when allowed and the
  // rank ranges line up; otherwise the parts are synthesized.
  Obdd combine(BoolOp op, std::vector<Obdd> parts, bool try_concat) {
    if (parts.empty()) return constant(m_, op == BoolOp::kAnd);
    std::sort(parts.begin(), parts.end(), [&](const Obdd& a, const Obdd& b) {
      return m_->rank(a.root) < m_->rank(b.root);
    });
    Obdd acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) {
      if (try_concat) {
        try {
          acc = concatenate(op, parts[i], acc);
          ++stats_.concatenations;
          continue;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kPrecondition) throw;
          ++stats_.refusals;
        }
      }
      acc = synthesize(op, parts[i], acc, &stats_.apply_visits);
      ++stats_.syntheses;
    }
    return acc;
  }

  const Instance& inst_;
  std::shared_ptr<ObddManager> m_;
  CompileStats& stats_;
};

}  // namespace detail

// Structural compilation of a Boolean UCQ into the manager's order.
inline Obdd con_obdd(const Ucq& q, const Instance& inst, const std::shared_ptr<ObddManager>& m,
                     CompileStats* stats = nullptr) {
  if (!q.is_boolean()) throw Error(ErrorCode::kPrecondition, "con_obdd requires a Boolean query");
  CompileStats local;
  detail::ConObdd c(inst, m, stats ? *stats : local);
  return c.build(q.disjuncts);
}

}  // namespace mvdb
