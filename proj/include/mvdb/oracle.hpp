#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "mvdb/grounding.hpp"
#include "mvdb/obdd.hpp"
#include "mvdb/translate.hpp"

namespace mvdb {

inline constexpr std::uint64_t kDefaultWorldCap = std::uint64_t{1} << 20;

struct KahanSum {
  double sum = 0;
  double c = 0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

using WorldMask = std::uint64_t;

// DNF as bitmask clauses over a fixed variable list.
struct MaskDnf {
  std::vector<WorldMask> clauses;
  bool holds(WorldMask world) const {
    for (WorldMask c : clauses)
      if ((world & c) == c) return true;
    return false;
  }
};

namespace detail {

inline void check_cap(std::size_t nvars, std::uint64_t cap) {
  if (nvars >= 63 || (std::uint64_t{1} << nvars) > cap) {
    throw Error(ErrorCode::kCapExceeded, std::to_string(nvars) + " Boolean variables exceed the world cap of " +
                                             std::to_string(cap) + " worlds");
  }
}

inline MaskDnf to_masks(const Lineage& phi, const std::unordered_map<TupleId, std::size_t>& bit) {
  MaskDnf out;
  for (const auto& c : phi.clauses) {
    WorldMask m = 0;
    for (TupleId t : c) m |= WorldMask{1} << bit.at(t);
    out.clauses.push_back(m);
  }
  return out;
}

// Visits all 2^n worlds in reflected Gray-code order.
inline void for_each_world(std::size_t n, const std::function<void(WorldMask)>& fn) {
  const WorldMask total = WorldMask{1} << n;
  for (WorldMask i = 0; i < total; ++i) fn(i ^ (i >> 1));
}

inline std::unordered_map<TupleId, std::size_t> bit_map(const std::vector<TupleId>& vars) {
  std::unordered_map<TupleId, std::size_t> bit;
  for (std::size_t i = 0; i < vars.size(); ++i) bit.emplace(vars[i], i);
  return bit;
}

}  // namespace detail

struct WorldWeight {
  WorldMask world = 0;  // bit i = vars[i] present
  double weight = 0;
};

// Grounded MLN of Def. 4 over the probabilistic tuples of an MVDB.
class MlnOracle {
 public:
  MlnOracle(const Mvdb& db, std::uint64_t cap = kDefaultWorldCap) : db_(db), vars_(db.instance.probabilistic_tuples()) {
    detail::check_cap(vars_.size(), cap);
    bit_ = detail::bit_map(vars_);
    for (const auto& v : db.views) {
      auto mat = materialize_view(v, db.instance);
      for (const auto& t : mat.tuples) {
        if (std::isinf(t.weight)) {
          throw Error(ErrorCode::kUnsupportedHardConstraint, "view " + v.name + ": weight inf is not supported");
        }
        features_.push_back({detail::to_masks(lineage(substitute(v.body, t.values), db.instance), bit_), t.weight});
      }
    }
  }

  const std::vector<TupleId>& variables() const { return vars_; }

  // Phi(I): tuple weights times satisfied view-feature weights.
  double world_weight(WorldMask world) const {
    double phi = 1;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (world >> i & 1) phi *= db_.instance.weight(vars_[i]);
    for (const auto& f : features_)
      if (f.formula.holds(world)) phi *= f.weight;
    return phi;
  }

  std::vector<WorldWeight> trace() const {
    std::vector<WorldWeight> out;
    detail::for_each_world(vars_.size(), [&](WorldMask w) { out.push_back({w, world_weight(w)}); });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.world < b.world; });
    return out;
  }

  double partition_function() const {
    KahanSum z;
    detail::for_each_world(vars_.size(), [&](WorldMask w) { z.add(world_weight(w)); });
    return z.sum;
  }

  double probability(const Ucq& q) const {
    MaskDnf phi = detail::to_masks(lineage(q, db_.instance), bit_);
    KahanSum z;
    KahanSum hit;
    detail::for_each_world(vars_.size(), [&](WorldMask w) {
      double phi_w = world_weight(w);
      z.add(phi_w);
      if (phi.holds(w)) hit.add(phi_w);
    });
    if (z.sum == 0) throw Error(ErrorCode::kInconsistentConstraints, "partition function is zero");
    return hit.sum / z.sum;
  }

 private:
  struct Feature {
    MaskDnf formula;
    double weight;
  };

  const Mvdb& db_;
  std::vector<TupleId> vars_;
  std::unordered_map<TupleId, std::size_t> bit_;
  std::vector<Feature> features_;
};

inline double mln_probability(const Mvdb& db, const Ucq& q, std::uint64_t cap = kDefaultWorldCap) {
  return MlnOracle(db, cap).probability(q);
}

// Signed product measure: sum over worlds of `vars` accepted by `accept`.
inline double indb_measure(const Instance& inst, const std::vector<TupleId>& vars,
                           const std::function<bool(WorldMask)>& accept, std::uint64_t cap = kDefaultWorldCap) {
  detail::check_cap(vars.size(), cap);
  std::vector<double> p;
  for (TupleId t : vars) p.push_back(inst.probability(t));
  KahanSum s;
  detail::for_each_world(vars.size(), [&](WorldMask w) {
    if (!accept(w)) return;
    double m = 1;
    for (std::size_t i = 0; i < p.size(); ++i) m *= (w >> i & 1) ? p[i] : 1.0 - p[i];
    s.add(m);
  });
  return s.sum;
}

inline double indb_probability(const Instance& inst, const Lineage& phi, std::uint64_t cap = kDefaultWorldCap) {
  auto vars = phi.variables();
  MaskDnf m = detail::to_masks(phi, detail::bit_map(vars));
  return indb_measure(inst, vars, [&](WorldMask w) { return m.holds(w); }, cap);
}

inline double indb_probability(const Instance& inst, const Obdd& g, std::uint64_t cap = kDefaultWorldCap) {
  const auto& order = g.manager->order();
  std::vector<TupleId> vars;
  for (NodeId u : reachable_nodes(*g.manager, g.root)) vars.push_back(order.tuple(g.manager->rank(u)));
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  auto bit = detail::bit_map(vars);
  return indb_measure(inst, vars, [&](WorldMask w) {
    return evaluate(g, [&](Rank r) { return (w >> bit.at(order.tuple(r))) & 1; });
  }, cap);
}

// Per-world signed weights prod_{t in I} w(t) of the INDB over `vars`.
inline std::vector<WorldWeight> indb_trace(const Instance& inst, const std::vector<TupleId>& vars,
                                           std::uint64_t cap = kDefaultWorldCap) {
  detail::check_cap(vars.size(), cap);
  std::vector<WorldWeight> out;
  detail::for_each_world(vars.size(), [&](WorldMask w) {
    double phi = 1;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (w >> i & 1) phi *= inst.weight(vars[i]);
    out.push_back({w, phi});
  });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.world < b.world; });
  return out;
}

// Exact P0 by enumeration over the variables of Q and W.
class IndbOracleEvaluator : public Evaluator {
 public:
  IndbOracleEvaluator(const TranslationResult& tr, std::uint64_t cap = kDefaultWorldCap)
      : tr_(tr), cap_(cap), w_(lineage(tr.w, tr.indb)) {}

  QueryMass evaluate(const Ucq& q) override {
    Lineage lq = lineage(q, tr_.indb);
    auto vars = lq.variables();
    auto wv = w_.variables();
    vars.insert(vars.end(), wv.begin(), wv.end());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    auto bit = detail::bit_map(vars);
    MaskDnf mq = detail::to_masks(lq, bit);
    MaskDnf mw = detail::to_masks(w_, bit);
    QueryMass m;
    m.numerator = indb_measure(tr_.indb, vars, [&](WorldMask x) { return mq.holds(x) && !mw.holds(x); }, cap_);
    m.denominator = indb_measure(tr_.indb, vars, [&](WorldMask x) { return !mw.holds(x); }, cap_);
    return m;
  }

  double p0_not_w() override {
    auto vars = w_.variables();
    MaskDnf mw = detail::to_masks(w_, detail::bit_map(vars));
    return indb_measure(tr_.indb, vars, [&](WorldMask x) { return !mw.holds(x); }, cap_);
  }

  const Lineage& w_lineage() const { return w_; }

 private:
  const TranslationResult& tr_;
  std::uint64_t cap_;
  Lineage w_;
};

struct Theorem1Result {
  double lhs = 0;  // MLN
  double rhs = 0;  // Eq. 5 on the INDB
  double delta = 0;
};

inline Theorem1Result theorem1_check(const Mvdb& db, const Ucq& q, std::uint64_t cap = kDefaultWorldCap) {
  Theorem1Result r;
  r.lhs = mln_probability(db, q, cap);
  auto tr = build_indb(db);
  Lineage lq = lineage(q, tr.indb);
  Lineage lw = lineage(tr.w, tr.indb);
  Lineage q_or_w = lq;
  q_or_w.append(lw);
  double p_qw = indb_probability(tr.indb, q_or_w, cap);
  double p_w = indb_probability(tr.indb, lw, cap);
  if (1 - p_w == 0) throw Error(ErrorCode::kInconsistentConstraints, "P0(W) = 1");
  r.rhs = (p_qw - p_w) / (1 - p_w);
  r.delta = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace mvdb
