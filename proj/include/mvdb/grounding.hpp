#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "mvdb/ucq.hpp"

namespace mvdb {

// Monotone DNF over probabilistic tuple variables. An empty clause list is
// false; a list containing the empty clause is true.
struct Lineage {
  std::vector<std::vector<TupleId>> clauses;

  bool is_false() const { return clauses.empty(); }
  bool is_true() const {
    return std::any_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.empty(); });
  }

  std::vector<TupleId> variables() const {
    std::vector<TupleId> out;
    for (const auto& c : clauses) out.insert(out.end(), c.begin(), c.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Sorts clauses, removes duplicates; collapses to {{}} when true.
  void normalize() {
    for (auto& c : clauses) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    if (is_true()) {
      clauses.assign(1, {});
      return;
    }
    std::sort(clauses.begin(), clauses.end());
    clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  }

  void append(const Lineage& other) {
    clauses.insert(clauses.end(), other.clauses.begin(), other.clauses.end());
    normalize();
  }

  template <typename IsTrue>
  bool evaluate(IsTrue&& is_true_var) const {
    for (const auto& c : clauses) {
      bool all = true;
      for (TupleId t : c)
        if (!is_true_var(t)) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  }
};

// (binding, matched tuples) for one homomorphism.
using HomomorphismFn = std::function<void(const std::vector<ConstId>&, const std::vector<TupleId>&)>;
using TupleFilter = std::function<bool(TupleId)>;

namespace detail {

class Matcher {
 public:
  Matcher(const ConjunctiveQuery& cq, const Instance& inst, const TupleFilter* filter, const HomomorphismFn& fn)
      : cq_(cq), inst_(inst), filter_(filter), fn_(fn) {
    binding_.assign(cq.var_names.size(), kMissingConst);
    used_.assign(cq.atoms.size(), false);
    matched_.assign(cq.atoms.size(), 0);
    pred_vars_.reserve(cq.predicates.size());
    for (const auto& p : cq.predicates) pred_vars_.push_back(predicate_vars(p));
  }

  void run() {
    for (const auto& a : cq_.atoms)
      for (const auto& t : a.args)
        if (!t.is_var() && t.id == kMissingConst) return;
    if (!predicates_hold()) return;
    search(0);
  }

 private:
  bool bound(const Term& t) const { return !t.is_var() || binding_[t.id] != kMissingConst; }
  ConstId value(const Term& t) const { return t.is_var() ? binding_[t.id] : t.id; }

  bool predicates_hold() const {
    for (std::size_t i = 0; i < cq_.predicates.size(); ++i) {
      bool ready = std::all_of(pred_vars_[i].begin(), pred_vars_[i].end(),
                               [&](VarId v) { return binding_[v] != kMissingConst; });
      if (ready && !eval_predicate(cq_.predicates[i], binding_, inst_.dictionary())) return false;
    }
    return true;
  }

  void search(std::size_t depth) {
    if (depth == cq_.atoms.size()) {
      std::vector<TupleId> clause;
      for (std::size_t i = 0; i < matched_.size(); ++i)
        if (inst_.is_probabilistic(matched_[i])) clause.push_back(matched_[i]);
      std::sort(clause.begin(), clause.end());
      clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
      fn_(binding_, clause);
      return;
    }
    // most-constrained unused atom first
    std::size_t best = cq_.atoms.size();
    std::span<const TupleId> best_candidates;
    for (std::size_t i = 0; i < cq_.atoms.size(); ++i) {
      if (used_[i]) continue;
      const Atom& a = cq_.atoms[i];
      std::span<const TupleId> cand = inst_.relation_tuples(a.relation);
      for (std::size_t pos = 0; pos < a.args.size(); ++pos) {
        if (!bound(a.args[pos])) continue;
        auto c = inst_.tuples_with(a.relation, pos, value(a.args[pos]));
        if (c.size() < cand.size()) cand = c;
      }
      if (best == cq_.atoms.size() || cand.size() < best_candidates.size()) {
        best = i;
        best_candidates = cand;
      }
    }
    const Atom& a = cq_.atoms[best];
    used_[best] = true;
    std::vector<VarId> newly;
    for (TupleId t : best_candidates) {
      if (filter_ && !(*filter_)(t)) continue;
      const auto& rec = inst_.tuple(t);
      bool ok = true;
      newly.clear();
      for (std::size_t pos = 0; pos < a.args.size() && ok; ++pos) {
        const Term& term = a.args[pos];
        if (bound(term)) {
          ok = value(term) == rec.values[pos];
        } else {
          binding_[term.id] = rec.values[pos];
          newly.push_back(term.id);
        }
      }
      if (ok && predicates_hold()) {
        matched_[best] = t;
        search(depth + 1);
      }
      for (VarId v : newly) binding_[v] = kMissingConst;
    }
    used_[best] = false;
  }

  const ConjunctiveQuery& cq_;
  const Instance& inst_;
  const TupleFilter* filter_;
  const HomomorphismFn& fn_;
  std::vector<ConstId> binding_;
  std::vector<bool> used_;
  std::vector<TupleId> matched_;
  std::vector<std::set<VarId>> pred_vars_;
};

}  // namespace detail

// Enumerates all homomorphisms of `cq` into the instance (restricted to
// tuples passing `filter` when given) whose predicates hold.
inline void for_each_homomorphism(const ConjunctiveQuery& cq, const Instance& inst, const HomomorphismFn& fn,
                                  const TupleFilter* filter = nullptr) {
  detail::Matcher(cq, inst, filter, fn).run();
}

inline Lineage lineage(const ConjunctiveQuery& cq, const Instance& inst) {
  Lineage out;
  for_each_homomorphism(cq, inst, [&](const auto&, const std::vector<TupleId>& clause) {
    out.clauses.push_back(clause);
  });
  out.normalize();
  return out;
}

inline Lineage lineage(const Ucq& q, const Instance& inst) {
  if (!q.is_boolean()) throw Error(ErrorCode::kPrecondition, "lineage requires a Boolean query");
  Lineage out;
  for (const auto& cq : q.disjuncts) {
    for_each_homomorphism(cq, inst, [&](const auto&, const std::vector<TupleId>& clause) {
      out.clauses.push_back(clause);
    });
  }
  out.normalize();
  return out;
}

// Head bindings with nonempty lineage over all possible tuples, in
// active-domain order.
inline std::vector<std::vector<ConstId>> answer_tuples(const Ucq& q, const Instance& inst) {
  std::set<std::vector<ConstId>> out;
  for (const auto& cq : q.disjuncts) {
    for_each_homomorphism(cq, inst, [&](const std::vector<ConstId>& b, const auto&) {
      std::vector<ConstId> head;
      for (VarId v : cq.head) head.push_back(b[v]);
      out.insert(std::move(head));
    });
  }
  return {out.begin(), out.end()};
}

// Direct evaluation on a world: deterministic tuples are always present,
// probabilistic ones iff `present(t)`.
inline bool holds_in_world(const Ucq& q, const Instance& inst, const std::function<bool(TupleId)>& present) {
  TupleFilter filter = [&](TupleId t) { return !inst.is_probabilistic(t) || present(t); };
  for (const auto& cq : q.disjuncts) {
    bool found = false;
    for_each_homomorphism(cq, inst, [&](const auto&, const auto&) { found = true; }, &filter);
    if (found) return true;
  }
  return false;
}

}  // namespace mvdb
