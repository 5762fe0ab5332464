#pragma once
// Shared fixtures for the test binaries.

#include <random>
#include <string>
#include <vector>

#include "mvdb/io.hpp"
#include "mvdb/mvindex.hpp"
#include "mvdb/oracle.hpp"

namespace mvdb::fixtures {

// Example 1: Tup = {R(a), S(a)}, V(x)[w] :- R(x), S(x).
inline Mvdb example1(double w1, double w2, double w) {
  ProjectText p;
  p.schema = "relation R(A:string) probabilistic\nrelation S(A:string) probabilistic\n";
  p.data["R"] = "a\t" + format_weight(w1) + "\n";
  p.data["S"] = "a\t" + format_weight(w2) + "\n";
  p.views = "VIEW V(x)[" + format_weight(w) + "] :- R(x), S(x)\n";
  return load_project(p);
}

// Fig. 3: R(a1), R(a2), S(a1,b1), S(a1,b2), S(a2,b3), S(a2,b4), all weight 1.
inline Mvdb fig3() {
  ProjectText p;
  p.schema = "relation R(A:string) probabilistic\nrelation S(A:string, B:string) probabilistic\n";
  p.data["R"] = "a1\t1\na2\t1\n";
  p.data["S"] = "a1\tb1\t1\na1\tb2\t1\na2\tb3\t1\na2\tb4\t1\n";
  return load_project(p);
}

inline TupleId tuple_named(const Instance& inst, const std::string& rel, const std::vector<std::string>& values) {
  std::vector<ConstId> ids;
  for (const auto& v : values) {
    auto c = inst.dictionary().find(Value{v});
    if (!c) throw Error(ErrorCode::kInput, "no constant " + v);
    ids.push_back(*c);
  }
  auto t = inst.find_tuple(*inst.schema().find(rel), ids);
  if (!t) throw Error(ErrorCode::kInput, "no tuple in " + rel);
  return *t;
}

// Random MVDBs over R(A), S(A,B), T(B) with a deterministic filter D(A).
struct RandomMvdb {
  Mvdb db;
  std::vector<std::string> queries;  // Boolean UCQ texts
};

inline const std::vector<double>& weight_menu() {
  static const std::vector<double> w = {0, 0.25, 0.5, 1, 2, 4};
  return w;
}

inline RandomMvdb random_mvdb(std::mt19937_64& rng, std::size_t max_tuples = 12, std::size_t max_views = 2,
                              std::size_t max_nv = 6) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::vector<std::string> as = {"a", "b", "c"};
  const std::vector<std::string> bs = {"1", "2", "3"};
  const std::vector<std::string> view_templates = {
      "VIEW V{i}(x)[{w}] :- R(x), S(x,y)",
      "VIEW V{i}(x,y)[{w}] :- S(x,y), T(y)",
      "VIEW V{i}(y)[{w}] :- S(x,y), T(y)",
      "VIEW V{i}(x)[{w}] :- R(x), D(x)",
      "VIEW V{i}(x,y,z)[0] :- S(x,y), S(x,z), y != z",
      "VIEW V{i}(x)[{w}] :- R(x), S(x,y) ; S(x,y), T(y)",
      "VIEW V{i}()[{w}] :- R(x), T(y)",
      "VIEW V{i}(x,y)[{w}] :- R(x), T(y)",
  };
  const std::vector<std::string> query_templates = {
      "Q() :- R(x), S(x,y)",
      "Q() :- S(x,y), T(y)",
      "Q() :- R(x), S(x,y), T(y)",
      "Q() :- R({a})",
      "Q() :- S({a},y)",
      "Q() :- T({b})",
      "Q() :- R(x), S(x,y) ; S(u,v), T(v)",
      "Q() :- R({a}) ; T({b})",
      "Q() :- S(x,{b}), D(x)",
      "Q() :- R(x), T(y)",
  };
  auto fill = [&](std::string s, std::size_t i, double w) {
    auto rep = [&](const std::string& from, const std::string& to) {
      for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from)) s.replace(pos, from.size(), to);
    };
    rep("{i}", std::to_string(i));
    rep("{w}", format_weight(w));
    rep("{a}", "\"" + as[pick(as.size())] + "\"");
    rep("{b}", "\"" + bs[pick(bs.size())] + "\"");
    return s;
  };
  for (;;) {
    ProjectText p;
    p.schema =
        "relation R(A:string) probabilistic\n"
        "relation S(A:string, B:string) probabilistic\n"
        "relation T(B:string) probabilistic\n"
        "relation D(A:string) deterministic\n";
    std::vector<std::string> all;
    for (const auto& a : as) all.push_back("R\t" + a);
    for (const auto& a : as)
      for (const auto& b : bs) all.push_back("S\t" + a + "\t" + b);
    for (const auto& b : bs) all.push_back("T\t" + b);
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t n = 3 + pick(max_tuples - 2);
    for (std::size_t i = 0; i < n && i < all.size(); ++i) {
      auto tab = all[i].find('\t');
      std::string rel = all[i].substr(0, tab);
      p.data[rel] += all[i].substr(tab + 1) + "\t" + format_weight(weight_menu()[pick(weight_menu().size())]) + "\n";
    }
    for (const auto& a : as)
      if (pick(2)) p.data["D"] += a + "\n";
    const std::size_t nv = 1 + pick(max_views);
    for (std::size_t i = 0; i < nv; ++i) {
      double w = weight_menu()[pick(weight_menu().size())];
      p.views += fill(view_templates[pick(view_templates.size())], i + 1, w) + "\n";
    }
    RandomMvdb out{load_project(p), {}};
    auto tr = build_indb(out.db);
    std::size_t nv_tuples = 0;
    for (RelId r : tr.nv_relations) nv_tuples += tr.indb.relation_tuples(r).size();
    if (nv_tuples > max_nv) continue;
    for (int q = 0; q < 5; ++q) out.queries.push_back(fill(query_templates[pick(query_templates.size())], 0, 1));
    return out;
  }
}

// Truth table of an OBDD against the lineage, over the lineage's variables.
inline bool same_function(const Obdd& g, const Lineage& phi, const VariableOrder& order) {
  auto vars = phi.variables();
  for (NodeId u : reachable_nodes(*g.manager, g.root)) vars.push_back(order.tuple(g.manager->rank(u)));
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > 20) throw Error(ErrorCode::kCapExceeded, "truth table too large");
  for (WorldMask w = 0; w < (WorldMask{1} << vars.size()); ++w) {
    auto present = [&](TupleId t) {
      auto it = std::find(vars.begin(), vars.end(), t);
      return it != vars.end() && (w >> (it - vars.begin()) & 1);
    };
    bool a = evaluate(g, [&](Rank r) { return present(order.tuple(r)); });
    bool b = phi.evaluate(present);
    if (a != b) return false;
  }
  return true;
}

inline double rel_diff(double a, double b) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

}  // namespace mvdb::fixtures
