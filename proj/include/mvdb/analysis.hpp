#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "mvdb/ucq.hpp"

namespace mvdb {

// Placeholder constants used when reasoning about a query symbolically; they
// never match a stored tuple.
inline constexpr ConstId kSymbolicBase = 0xF0000000u;

// Per-relation permutation of attribute positions (indexed by RelId).
struct PermutationSet {
  std::vector<std::vector<std::size_t>> perms;

  static PermutationSet identity(const Schema& schema) {
    PermutationSet p;
    for (const auto& r : schema.relations()) {
      std::vector<std::size_t> id(r.arity());
      std::iota(id.begin(), id.end(), 0);
      p.perms.push_back(std::move(id));
    }
    return p;
  }

  const std::vector<std::size_t>& of(RelId r) const { return perms.at(r); }
  bool operator==(const PermutationSet&) const = default;

  bool valid_for(const Schema& schema) const {
    if (perms.size() != schema.size()) return false;
    for (RelId r = 0; r < schema.size(); ++r) {
      auto sorted = perms[r];
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i) return false;
      if (sorted.size() != schema.relation(r).arity()) return false;
    }
    return true;
  }
};

namespace detail {

inline bool counts_for_structure(const Atom& a, const Schema* schema) {
  return !schema || schema->relation(a.relation).kind != RelationKind::kDeterministic;
}

}  // namespace detail

// Variables occurring in every atom. With a schema, atoms over deterministic
// relations are ignored: they contribute no Boolean variables.
inline std::set<VarId> root_variables(const ConjunctiveQuery& cq, const Schema* schema = nullptr) {
  std::optional<std::set<VarId>> acc;
  for (const auto& a : cq.atoms) {
    if (!detail::counts_for_structure(a, schema)) continue;
    auto vars = atom_vars(a);
    if (!acc) {
      acc = std::move(vars);
      continue;
    }
    std::set<VarId> both;
    std::set_intersection(acc->begin(), acc->end(), vars.begin(), vars.end(), std::inserter(both, both.end()));
    acc = std::move(both);
  }
  return acc.value_or(std::set<VarId>{});
}

struct Separator {
  std::vector<VarId> var_per_disjunct;
  std::map<RelId, std::size_t> position;  // attribute carrying z, per relation
};

namespace detail {

inline std::vector<std::size_t> positions_of(const Atom& a, VarId v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (a.args[i].is_var() && a.args[i].id == v) out.push_back(i);
  return out;
}

// Checks the same-position condition for one choice of root variables.
inline std::optional<Separator> check_separator(const std::vector<ConjunctiveQuery>& ds,
                                                const std::vector<VarId>& choice, const Schema* schema) {
  std::map<RelId, std::vector<std::size_t>> seen;
  for (std::size_t d = 0; d < ds.size(); ++d) {
    for (const auto& a : ds[d].atoms) {
      if (!counts_for_structure(a, schema)) continue;
      auto pos = positions_of(a, choice[d]);
      auto [it, inserted] = seen.emplace(a.relation, pos);
      if (!inserted && it->second != pos) return std::nullopt;
    }
  }
  Separator s;
  s.var_per_disjunct = choice;
  for (const auto& [rel, pos] : seen) s.position[rel] = pos.front();
  return s;
}

inline void for_each_separator(const std::vector<ConjunctiveQuery>& ds, const Schema* schema,
                               const std::function<bool(const Separator&)>& fn) {
  if (ds.empty()) return;
  std::vector<std::vector<VarId>> roots;
  for (const auto& cq : ds) {
    bool any = std::any_of(cq.atoms.begin(), cq.atoms.end(),
                           [&](const Atom& a) { return counts_for_structure(a, schema); });
    if (!any) return;
    auto r = root_variables(cq, schema);
    if (r.empty()) return;
    roots.emplace_back(r.begin(), r.end());
  }
  std::vector<std::size_t> idx(ds.size(), 0);
  std::size_t budget = 100000;
  while (budget--) {
    std::vector<VarId> choice(ds.size());
    for (std::size_t d = 0; d < ds.size(); ++d) choice[d] = roots[d][idx[d]];
    if (auto s = check_separator(ds, choice, schema)) {
      if (fn(*s)) return;
    }
    std::size_t d = ds.size();
    while (d > 0) {
      --d;
      if (++idx[d] < roots[d].size()) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

}  // namespace detail

// The lexicographically first choice of one root variable per disjunct that
// sits at a consistent attribute position in every atom of each relation.
inline std::optional<Separator> find_separator(const std::vector<ConjunctiveQuery>& disjuncts,
                                               const Schema* schema = nullptr) {
  std::optional<Separator> out;
  detail::for_each_separator(disjuncts, schema, [&](const Separator& s) {
    out = s;
    return true;
  });
  return out;
}

inline std::optional<Separator> find_separator(const Ucq& q, const Schema* schema = nullptr) {
  return find_separator(q.disjuncts, schema);
}

namespace detail {

// Groups of items connected through shared keys; returns item indices per group.
template <typename KeysFn>
std::vector<std::vector<std::size_t>> connected_groups(std::size_t n, KeysFn&& keys_of) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::uint64_t, std::size_t> owner;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint64_t k : keys_of(i)) {
      auto [it, inserted] = owner.emplace(k, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  return out;
}

// Splits a conjunctive query into variable-connected components; ground
// atoms form singleton components. Predicates attach to the component of
// their variables (variable-free predicates go with the first component).
inline std::vector<ConjunctiveQuery> components(const ConjunctiveQuery& cq) {
  const std::size_t na = cq.atoms.size();
  const std::size_t n = na + cq.predicates.size();
  auto groups = connected_groups(n, [&](std::size_t i) {
    std::vector<std::uint64_t> keys;
    std::set<VarId> vs = i < na ? atom_vars(cq.atoms[i]) : predicate_vars(cq.predicates[i - na]);
    for (VarId v : vs) keys.push_back(v);
    return keys;
  });
  std::vector<ConjunctiveQuery> out;
  std::vector<Predicate> floating;
  for (const auto& g : groups) {
    ConjunctiveQuery c;
    c.var_names = cq.var_names;
    for (std::size_t i : g) {
      if (i < na) c.atoms.push_back(cq.atoms[i]);
      else c.predicates.push_back(cq.predicates[i - na]);
    }
    if (c.atoms.empty()) {
      for (auto& p : c.predicates) floating.push_back(std::move(p));
      continue;
    }
    out.push_back(std::move(c));
  }
  if (!out.empty()) {
    for (auto& p : floating) out.front().predicates.push_back(std::move(p));
  } else if (!floating.empty()) {
    ConjunctiveQuery c;
    c.var_names = cq.var_names;
    c.predicates = std::move(floating);
    out.push_back(std::move(c));
  }
  return out;
}

// Disjunct groups connected through shared relation symbols.
inline std::vector<std::vector<std::size_t>> relation_groups(const std::vector<ConjunctiveQuery>& ds) {
  return connected_groups(ds.size(), [&](std::size_t i) {
    std::vector<std::uint64_t> keys;
    for (RelId r : relations_of(ds[i])) keys.push_back(r);
    return keys;
  });
}

class PiSearch {
 public:
  PiSearch(const Schema& schema, bool greedy) : schema_(schema), greedy_(greedy), prefix_(schema.size()) {}

  bool run(std::vector<ConjunctiveQuery> ds) { return search(std::move(ds)); }

  PermutationSet result() const {
    PermutationSet p;
    for (RelId r = 0; r < schema_.size(); ++r) {
      auto perm = prefix_[r];
      for (std::size_t i = 0; i < schema_.relation(r).arity(); ++i)
        if (std::find(perm.begin(), perm.end(), i) == perm.end()) perm.push_back(i);
      p.perms.push_back(std::move(perm));
    }
    return p;
  }

 private:
  using Prefixes = std::vector<std::vector<std::size_t>>;

  // Drops ground and deterministic atoms and disjuncts left without
  // structural atoms.
  std::vector<ConjunctiveQuery> simplify(std::vector<ConjunctiveQuery> ds) const {
    std::vector<ConjunctiveQuery> out;
    for (auto& cq : ds) {
      bool keep = std::any_of(cq.atoms.begin(), cq.atoms.end(), [&](const Atom& a) {
        return counts_for_structure(a, &schema_) && !atom_is_ground(a);
      });
      if (keep) out.push_back(std::move(cq));
    }
    return out;
  }

  // Fixes z's position as the next permutation entry after the atom's
  // constant positions.
  bool constrain(Prefixes& pre, const std::vector<ConjunctiveQuery>& ds, const Separator& s) const {
    for (std::size_t d = 0; d < ds.size(); ++d) {
      for (const auto& a : ds[d].atoms) {
        if (!counts_for_structure(a, &schema_)) continue;
        auto zpos = positions_of(a, s.var_per_disjunct[d]);
        if (zpos.empty()) continue;
        std::vector<std::size_t> consts;
        for (std::size_t i = 0; i < a.args.size(); ++i)
          if (!a.args[i].is_var()) consts.push_back(i);
        auto& p = pre[a.relation];
        std::size_t k = consts.size();
        std::vector<std::size_t> head(p.begin(), p.begin() + std::min(k, p.size()));
        std::sort(head.begin(), head.end());
        if (!std::includes(consts.begin(), consts.end(), head.begin(), head.end())) return false;
        if (p.size() < k) {
          for (std::size_t c : consts)
            if (std::find(p.begin(), p.end(), c) == p.end()) p.push_back(c);
        }
        if (p.size() == k) {
          p.push_back(zpos.front());
        } else if (p[k] != zpos.front()) {
          return false;
        }
      }
    }
    return true;
  }

  std::vector<ConjunctiveQuery> bind(const std::vector<ConjunctiveQuery>& ds, const std::vector<VarId>& vars) {
    ConstId c = kSymbolicBase + next_symbol_++;
    std::vector<ConjunctiveQuery> out;
    for (std::size_t d = 0; d < ds.size(); ++d) out.push_back(substitute_var(ds[d], vars[d], c));
    return out;
  }

  bool search(std::vector<ConjunctiveQuery> ds) {
    ds = simplify(std::move(ds));
    if (ds.empty()) return true;

    bool ok = false;
    for_each_separator(ds, &schema_, [&](const Separator& s) {
      Prefixes trial = prefix_;
      if (!constrain(trial, ds, s)) return false;
      Prefixes saved = prefix_;
      prefix_ = std::move(trial);
      if (search(bind(ds, s.var_per_disjunct)) || greedy_) {
        ok = true;
        return true;
      }
      prefix_ = std::move(saved);
      return false;
    });
    if (ok) return true;

    if (ds.size() > 1) {
      auto groups = relation_groups(ds);
      bool all = true;
      if (groups.size() > 1) {
        for (const auto& g : groups) {
          std::vector<ConjunctiveQuery> sub;
          for (std::size_t i : g) sub.push_back(ds[i]);
          all = search(std::move(sub)) && all;
          if (!all && !greedy_) return false;
        }
        return all;
      }
      for (auto& cq : ds) {
        all = search({cq}) && all;
        if (!all && !greedy_) return false;
      }
      return all;
    }

    auto comps = components(ds.front());
    if (comps.size() > 1) {
      bool all = true;
      for (auto& c : comps) {
        all = search({c}) && all;
        if (!all && !greedy_) return false;
      }
      return all;
    }
    if (!greedy_) return false;
    // no separator: expand the most frequent variable and keep going
    const auto& cq = ds.front();
    std::map<VarId, std::size_t> freq;
    for (const auto& a : cq.atoms)
      if (counts_for_structure(a, &schema_))
        for (VarId v : atom_vars(a)) ++freq[v];
    if (freq.empty()) return true;
    VarId best = freq.begin()->first;
    for (const auto& [v, f] : freq)
      if (f > freq[best]) best = v;
    search(bind(ds, {best}));
    return false;
  }

  const Schema& schema_;
  bool greedy_;
  Prefixes prefix_;
  std::uint32_t next_symbol_ = 0;
};

}  // namespace detail

// A permutation set under which every existential expansion concatenates,
// or nullopt if the recursive search finds none.
inline std::optional<PermutationSet> is_inversion_free(const Ucq& q, const Schema& schema) {
  detail::PiSearch s(schema, false);
  if (!s.run(q.disjuncts)) return std::nullopt;
  return s.result();
}

// The inversion-free witness when one exists; otherwise separator attributes
// first, greedily repeated on the residual query.
inline PermutationSet choose_pi(const Ucq& q, const Schema& schema) {
  if (auto w = is_inversion_free(q, schema)) return *w;
  detail::PiSearch s(schema, true);
  s.run(q.disjuncts);
  return s.result();
}

}  // namespace mvdb
