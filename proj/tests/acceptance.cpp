// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 on any FAIL.
#include <cstdio>
#include <random>
#include <sstream>

#include "mvdb/dblp.hpp"
#include "support.hpp"

using namespace mvdb;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// 1. Theorem 1 on random MVDBs.
Check theorem1() {
  Check c;
  std::mt19937_64 rng(1001);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    auto r = fixtures::random_mvdb(rng);
    for (const auto& text : r.queries) {
      auto t = theorem1_check(r.db, parse_query(text, r.db.instance));
      worst = std::max(worst, t.delta);
      if (!(t.delta <= 1e-9)) c.fail("delta " + fmt(t.delta) + " on " + text);
    }
  }
  if (c.ok) c.detail = "200 MVDBs x 5 UCQs, max delta " + fmt(worst);
  return c;
}

// 2. Example 1 world weights and all 16 events over its four worlds.
Check example1() {
  Check c;
  double worst = 0;
  for (auto [w1, w2, w] : {std::tuple{2.0, 3.0, 0.5}, {0.25, 4.0, 2.0}, {1.0, 1.0, 0.0}, {3.0, 0.5, 7.0}}) {
    auto db = fixtures::example1(w1, w2, w);
    MlnOracle mln(db);
    auto trace = mln.trace();
    const double want[4] = {1, w1, w2, w * w1 * w2};
    for (int i = 0; i < 4; ++i)
      if (fixtures::rel_diff(trace[i].weight, want[i]) > 1e-15) c.fail("world weight mismatch");
    auto tr = build_indb(db);
    std::vector<TupleId> vars = {fixtures::tuple_named(tr.indb, "R", {"a"}), fixtures::tuple_named(tr.indb, "S", {"a"})};
    bool has_nv = !tr.nv_relations.empty();
    if (has_nv) vars.push_back(tr.indb.relation_tuples(tr.nv_relations[0])[0]);
    auto in_w = [&](WorldMask x) { return has_nv ? x == 7 : (x & 3) == 3; };
    double den = indb_measure(tr.indb, vars, [&](WorldMask x) { return !in_w(x); });
    double z = mln.partition_function();
    for (unsigned e = 0; e < 16; ++e) {
      double lhs = 0;
      for (int i = 0; i < 4; ++i)
        if (e >> i & 1) lhs += trace[i].weight;
      lhs /= z;
      double num = indb_measure(tr.indb, vars, [&](WorldMask x) { return (e >> (x & 3) & 1) && !in_w(x); });
      double d = std::abs(lhs - num / den);
      worst = std::max(worst, d);
      if (d > 1e-12) c.fail("event " + std::to_string(e) + " differs by " + fmt(d));
    }
  }
  if (c.ok) c.detail = "4 weight settings x 16 events, max delta " + fmt(worst);
  return c;
}

// 3. The seven worlds of the translated Example 1 grouped by (R, S).
Check seven_worlds() {
  Check c;
  auto db = fixtures::example1(2, 3, 0.5);
  auto tr = build_indb(db);
  std::vector<TupleId> vars = {fixtures::tuple_named(tr.indb, "R", {"a"}), fixtures::tuple_named(tr.indb, "S", {"a"}),
                               fixtures::tuple_named(tr.indb, "NV_V", {"a"})};
  const double w0 = tr.indb.weight(vars[2]);
  double got[4] = {0, 0, 0, 0};
  std::size_t n = 0;
  for (const auto& ww : indb_trace(tr.indb, vars)) {
    if (ww.world == 7) continue;
    ++n;
    got[ww.world & 3] += ww.weight;
  }
  const double want[4] = {1 + w0, (1 + w0) * 2, (1 + w0) * 3, 2.0 * 3};
  if (w0 != 1) c.fail("w0 = " + fmt(w0));
  if (n != 7) c.fail(std::to_string(n) + " worlds");
  for (int i = 0; i < 4; ++i)
    if (got[i] != want[i]) c.fail("group " + std::to_string(i) + " = " + fmt(got[i]));
  if (c.ok) c.detail = "totals 2, 4, 6, 6 exact";
  return c;
}

// 4. Fig. 3 order and truth table.
Check fig3() {
  Check c;
  auto db = fixtures::fig3();
  const auto& inst = db.instance;
  auto q = parse_query("Q() :- R(x), S(x,y)", inst);
  auto order = std::make_shared<VariableOrder>(tuple_order(inst, choose_pi(q, inst.schema())));
  std::string names;
  for (TupleId t : order->tuples()) names += inst.tuple_to_string(t) + " ";
  if (names != "R(a1) S(a1,b1) S(a1,b2) R(a2) S(a2,b3) S(a2,b4) ") c.fail("order " + names);
  auto m = std::make_shared<ObddManager>(order);
  auto g = con_obdd(q, inst, m);
  for (int w = 0; w < 64; ++w) {
    auto bit = [&](Rank r) { return (w >> r & 1) != 0; };
    bool want = (bit(0) && (bit(1) || bit(2))) || (bit(3) && (bit(4) || bit(5)));
    if (evaluate(g, bit) != want) c.fail("row " + std::to_string(w));
  }
  if (c.ok) c.detail = "order X1 Y1 Y2 X2 Y3 Y4, 64 rows match, " + std::to_string(metrics(g).size) + " nodes";
  return c;
}

// 5. Denial view V2: width constant, size linear in the number of students.
Check v2_scaling() {
  Check c;
  std::vector<std::size_t> sizes, widths;
  for (std::size_t n : {50, 100, 200}) {
    DblpConfig cfg;
    cfg.students = n;
    cfg.advisors_per_student = 3;
    cfg.with_v1 = false;
    auto tr = build_indb(load_project(gen_dblp(cfg)));
    auto idx = build_index(tr);
    std::size_t size = 0, width = 0;
    for (const auto& con : idx.constituents) {
      size += con.size();
      width = std::max(width, con.width);
    }
    sizes.push_back(size);
    widths.push_back(width);
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < sizes.size(); ++i) os << (i ? ", " : "") << sizes[i] << "/" << widths[i];
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    double ratio = double(sizes[i]) / double(sizes[i - 1]);
    if (widths[i] != widths[0]) c.fail("width changed: " + os.str());
    if (ratio < 1.9 || ratio > 2.1) c.fail("size ratio " + fmt(ratio) + ": " + os.str());
  }
  c.detail = (c.ok ? "size/width at n=50,100,200: " : c.detail + "; ") + os.str();
  return c;
}

// 6. CC-MVIntersect visits at most m * width nodes (m: rank span of the query) and agrees with MVIntersect.
Check cc_bound() {
  Check c;
  std::mt19937_64 rng(2002);
  std::size_t pairs = 0;
  double worst = 0;
  while (pairs < 500) {
    auto r = fixtures::random_mvdb(rng);
    auto tr = build_indb(r.db);
    auto idx = build_index(tr);
    std::size_t width = 0;
    for (const auto& con : idx.constituents) width = std::max(width, con.width);
    auto m = std::make_shared<ObddManager>(idx.order);
    for (const auto& text : r.queries) {
      auto g = from_lineage(lineage(parse_query(text, tr.indb), tr.indb), m);
      IntersectStats st;
      double a = mv_intersect(g, idx);
      double b = cc_mv_intersect(g, idx, &st);
      double d = fixtures::rel_diff(a, b);
      worst = std::max(worst, d);
      if (d > 1e-12) c.fail("mv " + fmt(a) + " vs cc " + fmt(b) + " on " + text);
      auto mt = metrics(g);
      const std::size_t span = mt.size ? mt.max_rank - mt.min_rank + 1 : 0;
      if (st.visited > span * width) {
        c.fail("visited " + std::to_string(st.visited) + " > " + std::to_string(span) + " x " + std::to_string(width));
      }
      ++pairs;
    }
  }
  if (c.ok) c.detail = std::to_string(pairs) + " pairs, max relative diff " + fmt(worst);
  return c;
}

// 7. Identities with negative probabilities; P(Q) stays in [0, 1].
Check negative_probabilities() {
  Check c;
  double worst = 0;
  auto note = [&](double d, const std::string& what) {
    worst = std::max(worst, d);
    if (d > 1e-12) c.fail(what + " off by " + fmt(d));
  };
  auto db = fixtures::example1(2, 3, 4);
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  auto m = std::make_shared<ObddManager>(idx.order);
  TupleId nv = tr.indb.relation_tuples(tr.nv_relations[0])[0];
  if (!(tr.indb.probability(nv) < 0)) c.fail("NV probability is not negative");
  auto prob = [&](Rank r) { return idx.prob[r]; };
  auto var = [&](const std::string& rel) {
    TupleId t = rel == "NV" ? nv : fixtures::tuple_named(tr.indb, rel, {"a"});
    return Obdd{m, m->variable(idx.order->rank(t))};
  };
  auto x = var("NV"), r = var("R"), s = var("S");
  auto q1 = synthesize(BoolOp::kOr, x, r);
  auto q2 = synthesize(BoolOp::kAnd, x, s);
  for (const auto& g : {x, r, s, q1, q2}) {
    note(std::abs(mv_intersect(g, idx) + mv_intersect(negate(g), idx) - idx.p0_not_w), "complement");
    note(std::abs(shannon_probability(g, prob) + shannon_probability(negate(g), prob) - 1), "P0 complement");
  }
  double ie = mv_intersect(q1, idx) + mv_intersect(q2, idx) - mv_intersect(synthesize(BoolOp::kAnd, q1, q2), idx);
  note(std::abs(mv_intersect(synthesize(BoolOp::kOr, q1, q2), idx) - ie), "inclusion-exclusion");
  double p_x = shannon_probability(x, prob), p_r = shannon_probability(r, prob), p_s = shannon_probability(s, prob);
  note(std::abs(shannon_probability(synthesize(BoolOp::kAnd, x, r), prob) - p_x * p_r), "product");
  note(std::abs(shannon_probability(synthesize(BoolOp::kAnd, synthesize(BoolOp::kAnd, x, r), s), prob) - p_x * p_r * p_s),
       "triple product");

  // every answer probability over random MVDBs with w > 1 views
  std::mt19937_64 rng(3003);
  std::size_t evaluated = 0;
  for (int i = 0; i < 60; ++i) {
    auto rm = fixtures::random_mvdb(rng);
    auto rt = build_indb(rm.db);
    auto ri = build_index(rt);
    if (ri.inconsistent()) continue;
    MvEvaluator ev(rt, ri, Engine::kCcMv);
    for (const auto& text : rm.queries) {
      double p = query_probability(parse_query(text, rt.indb), rt, ev);
      ++evaluated;
      if (p < -1e-9 || p > 1 + 1e-9) c.fail("P = " + fmt(p) + " for " + text);
    }
  }
  if (c.ok) c.detail = "NV p0 = " + fmt(tr.indb.probability(nv)) + ", max identity error " + fmt(worst) + ", " +
                       std::to_string(evaluated) + " probabilities in range";
  return c;
}

// 8. DBLP analogue: students of one advisor, ccmv against the MLN oracle.
Check dblp_students() {
  Check c;
  DblpConfig cfg;
  cfg.seed = 1;
  auto db = load_project(gen_dblp(cfg));
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  MvEvaluator ev(tr, idx, Engine::kCcMv);
  MlnOracle mln(db);
  auto q = parse_query(dblp_query_students_of("Madden"), tr.indb);
  auto answers = answer_query(q, tr, ev);
  if (answers.empty()) c.fail("no answers");
  double worst = 0;
  for (const auto& a : answers) {
    double want = mln.probability(substitute(q, a.values));
    double d = std::abs(a.probability - want);
    worst = std::max(worst, d);
    if (d > 1e-9) c.fail("answer differs by " + fmt(d));
  }
  if (c.ok) c.detail = std::to_string(answers.size()) + " answers, max delta " + fmt(worst);
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Check (*run)();
  };
  const Criterion all[] = {
      {"theorem 1 on random MVDBs", theorem1},
      {"example 1 worlds and events", example1},
      {"seven-world table", seven_worlds},
      {"fig. 3 order and OBDD", fig3},
      {"V2 index scaling", v2_scaling},
      {"cc-mvintersect bound and agreement", cc_bound},
      {"negative probability identities", negative_probabilities},
      {"dblp students of advisor", dblp_students},
  };
  bool ok = true;
  int i = 0;
  for (const auto& cr : all) {
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.fail(std::string("exception: ") + e.what());
    }
    ok = ok && c.ok;
    std::printf("criterion %d: %s  %s (%s)\n", ++i, c.ok ? "PASS" : "FAIL", cr.name, c.detail.c_str());
  }
  return ok ? 0 : 1;
}
