#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mvdb/grounding.hpp"
#include "mvdb/parser.hpp"

namespace mvdb {

// Possible tuples with weights in [0, inf] plus the MarkoViews.
struct Mvdb {
  Instance instance;
  std::vector<MarkoView> views;
};

struct ViewTuple {
  std::vector<ConstId> values;
  double weight = 1.0;
};

struct ViewMaterialization {
  std::string view;
  std::vector<ViewTuple> tuples;  // in active-domain order
};

// Evaluates the body over I_poss; the weight of an output tuple must be the
// same under every witnessing binding.
inline ViewMaterialization materialize_view(const MarkoView& v, const Instance& inst) {
  std::map<std::vector<ConstId>, double> out;
  for (std::size_t d = 0; d < v.body.disjuncts.size(); ++d) {
    const auto& cq = v.body.disjuncts[d];
    const Expr& expr = *v.weight.at(d);
    for_each_homomorphism(cq, inst, [&](const std::vector<ConstId>& b, const auto&) {
      ExprValue ev = eval_expr(expr, b, inst.dictionary());
      const double* w = std::get_if<double>(&ev);
      if (!w) throw Error(ErrorCode::kInvalidView, "view " + v.name + ": weight is not numeric");
      if (std::isnan(*w) || *w < 0) {
        throw Error(ErrorCode::kInvalidView, "view " + v.name + ": weight must be non-negative");
      }
      std::vector<ConstId> head;
      for (VarId h : cq.head) head.push_back(b[h]);
      auto [it, inserted] = out.emplace(std::move(head), *w);
      if (!inserted && it->second != *w) {
        throw Error(ErrorCode::kInvalidView, "view " + v.name + ": weight differs between witnesses of one tuple");
      }
    });
  }
  ViewMaterialization m{v.name, {}};
  for (auto& [vals, w] : out) m.tuples.push_back({vals, w});
  return m;
}

struct TranslateOptions {
  // keep denial tuples as an explicit deterministic NV atom in W_i
  bool explicit_denial_nv = false;
};

struct TranslationResult {
  Instance indb;                         // original relations plus NV relations
  Ucq w;                                 // W = OR of the W_i
  std::vector<Ucq> w_parts;              // W_i per view
  std::vector<ViewMaterialization> views;
  std::vector<RelId> nv_relations;       // probabilistic NV relation per view, if any
  std::size_t original_relations = 0;
};

namespace detail {

inline std::vector<Attribute> head_attributes(const MarkoView& v, const Schema& schema) {
  const auto& cq = v.body.disjuncts.front();
  std::vector<Attribute> out;
  for (VarId h : cq.head) {
    Attribute a{cq.var_names.at(h), AttrType::kInt};
    bool found = false;
    for (const auto& atom : cq.atoms) {
      for (std::size_t i = 0; i < atom.args.size() && !found; ++i) {
        if (atom.args[i].is_var() && atom.args[i].id == h) {
          a.type = schema.relation(atom.relation).attributes[i].type;
          found = true;
        }
      }
    }
    out.push_back(a);
  }
  return out;
}

inline std::string fresh_name(const Schema& schema, std::string base) {
  std::string name = base;
  for (int i = 2; schema.find(name); ++i) name = base + "_" + std::to_string(i);
  return name;
}

// Copies each body disjunct with NV(head) prepended (when `nv` is set) and
// the head made existential.
inline std::vector<ConjunctiveQuery> guarded_body(const MarkoView& v, std::optional<RelId> nv) {
  std::vector<ConjunctiveQuery> out;
  for (auto cq : v.body.disjuncts) {
    if (nv) {
      Atom a{*nv, {}};
      for (VarId h : cq.head) a.args.push_back(Term::var(h));
      cq.atoms.insert(cq.atoms.begin(), std::move(a));
    }
    cq.head.clear();
    out.push_back(std::move(cq));
  }
  return out;
}

}  // namespace detail

// Def. 5: NV tuples get w0 = (1 - w)/w, i.e. probability 1 - w. Denial
// tuples (w = 0) make NV deterministic, so W_i is just the body.
inline TranslationResult build_indb(const Mvdb& db, const TranslateOptions& opt = {}) {
  TranslationResult tr{db.instance, {}, {}, {}, {}, db.instance.schema().size()};
  tr.w.name = "W";
  for (const auto& v : db.views) {
    auto mat = materialize_view(v, db.instance);
    std::vector<const ViewTuple*> soft;
    std::vector<const ViewTuple*> denial;
    for (const auto& t : mat.tuples) {
      if (std::isinf(t.weight)) {
        throw Error(ErrorCode::kUnsupportedHardConstraint,
                    "view " + v.name + ": weight inf (hard positive constraint) is not supported");
      }
      (t.weight == 0 ? denial : soft).push_back(&t);
    }
    auto attrs = detail::head_attributes(v, tr.indb.schema());
    Ucq wi;
    wi.name = "W_" + v.name;
    if (!soft.empty()) {
      RelId nv = tr.indb.add_relation(
          {detail::fresh_name(tr.indb.schema(), "NV_" + v.name), attrs, {}, RelationKind::kViewAux});
      for (const auto* t : soft) tr.indb.add_tuple(nv, t->values, (1.0 - t->weight) / t->weight);
      tr.nv_relations.push_back(nv);
      for (auto& cq : detail::guarded_body(v, nv)) wi.disjuncts.push_back(std::move(cq));
    }
    if (!denial.empty()) {
      std::optional<RelId> filter;
      if (!soft.empty() || opt.explicit_denial_nv) {
        // restrict the body to the denial tuples with a deterministic guard
        auto kind = opt.explicit_denial_nv ? RelationKind::kViewAux : RelationKind::kDeterministic;
        filter = tr.indb.add_relation({detail::fresh_name(tr.indb.schema(), "ND_" + v.name), attrs, {}, kind});
        for (const auto* t : denial) tr.indb.add_tuple(*filter, t->values, kInf);
      }
      for (auto& cq : detail::guarded_body(v, filter)) wi.disjuncts.push_back(std::move(cq));
    }
    for (const auto& cq : wi.disjuncts) tr.w.disjuncts.push_back(cq);
    tr.w_parts.push_back(std::move(wi));
    tr.views.push_back(std::move(mat));
  }
  return tr;
}

// P = numerator / denominator; evaluators may cancel common factors.
struct QueryMass {
  double numerator = 0;    // P0(Q and not W), possibly scaled
  double denominator = 1;  // P0(not W), same scale
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual QueryMass evaluate(const Ucq& boolean_query) = 0;
  virtual double p0_not_w() = 0;
};

inline void check_query_relations(const Ucq& q, const TranslationResult& tr) {
  for (const auto& cq : q.disjuncts)
    for (const auto& a : cq.atoms)
      if (a.relation >= tr.original_relations) {
        throw Error(ErrorCode::kInput, "query " + q.name + " refers to a view-auxiliary relation");
      }
}

// Eq. 5 in the form P0(Q and not W) / P0(not W).
inline double query_probability(const Ucq& q, const TranslationResult& tr, Evaluator& ev) {
  check_query_relations(q, tr);
  QueryMass m = ev.evaluate(q);
  if (m.denominator == 0 || !std::isfinite(m.denominator)) {
    throw Error(ErrorCode::kInconsistentConstraints, "P0(not W) = 0: no world satisfies the constraints");
  }
  return m.numerator / m.denominator;
}

struct Answer {
  std::vector<ConstId> values;
  double probability = 0;
};

// Candidates come from I_poss; one Boolean evaluation per candidate.
inline std::vector<Answer> answer_query(const Ucq& q, const TranslationResult& tr, Evaluator& ev) {
  check_query_relations(q, tr);
  std::vector<Answer> out;
  for (auto& a : answer_tuples(q, tr.indb)) {
    double p = query_probability(substitute(q, a), tr, ev);
    out.push_back({std::move(a), p});
  }
  return out;
}

}  // namespace mvdb
