#include <gtest/gtest.h>

#include <random>

#include "mvdb/dblp.hpp"
#include "mvdb/serialize.hpp"
#include "support.hpp"

using namespace mvdb;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kUsage;
}

Obdd query_obdd(const std::string& text, const TranslationResult& tr, const std::shared_ptr<ObddManager>& m) {
  return from_lineage(lineage(parse_query(text, tr.indb), tr.indb), m);
}

}  // namespace

TEST(MvIndex, Example1) {
  auto db = fixtures::example1(2, 3, 0.5);
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  ASSERT_EQ(idx.constituents.size(), 1u);
  EXPECT_LE(idx.constituents[0].size(), 5u);
  EXPECT_EQ(idx.constituents[0].width, 1u);
  IndbOracleEvaluator ev(tr);
  EXPECT_NEAR(idx.p0_not_w, ev.p0_not_w(), 1e-15);
  EXPECT_NEAR(idx.p0_w + idx.p0_not_w, 1.0, 1e-15);
  EXPECT_FALSE(idx.inconsistent());
}

TEST(MvIndex, FrontierIdentity) {
  // probUnder(root) of each constituent multiplies to P0(not W)
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = fixtures::random_mvdb(rng);
    auto tr = build_indb(r.db);
    auto idx = build_index(tr);
    double prod = 1;
    for (const auto& c : idx.constituents) prod *= c.root_probability();
    IndbOracleEvaluator ev(tr);
    EXPECT_NEAR(prod, ev.p0_not_w(), 1e-12);
    EXPECT_NEAR(idx.p0_not_w, ev.p0_not_w(), 1e-12);
    for (std::size_t i = 1; i < idx.constituents.size(); ++i)
      EXPECT_LT(idx.constituents[i - 1].max_rank, idx.constituents[i].min_rank);
  }
}

TEST(MvIndex, IntersectMatchesOracle) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 80; ++trial) {
    auto r = fixtures::random_mvdb(rng);
    auto tr = build_indb(r.db);
    auto idx = build_index(tr);
    auto m = std::make_shared<ObddManager>(idx.order);
    IndbOracleEvaluator oracle(tr);
    for (const auto& text : r.queries) {
      auto q = parse_query(text, tr.indb);
      double want = oracle.evaluate(q).numerator;
      auto g = query_obdd(text, tr, m);
      EXPECT_NEAR(mv_intersect(g, idx), want, 1e-12) << text;
      EXPECT_NEAR(cc_mv_intersect(g, idx), want, 1e-12) << text;
    }
  }
}

TEST(MvIndex, EvaluatorsAgreeWithMln) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto r = fixtures::random_mvdb(rng);
    auto tr = build_indb(r.db);
    auto idx = build_index(tr);
    if (idx.inconsistent()) continue;
    MvEvaluator mv(tr, idx, Engine::kMv), cc(tr, idx, Engine::kCcMv);
    for (const auto& text : r.queries) {
      auto q = parse_query(text, tr.indb);
      double want = mln_probability(r.db, q);
      EXPECT_NEAR(query_probability(q, tr, mv), want, 1e-9) << text;
      EXPECT_NEAR(query_probability(q, tr, cc), want, 1e-9) << text;
    }
  }
}

TEST(MvIndex, PointProbability) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    auto r = fixtures::random_mvdb(rng);
    auto tr = build_indb(r.db);
    auto idx = build_index(tr);
    auto m = std::make_shared<ObddManager>(idx.order);
    for (TupleId t : tr.indb.probabilistic_tuples()) {
      Obdd g{m, m->variable(idx.order->rank(t))};
      EXPECT_NEAR(point_probability(t, idx, m), mv_intersect(g, idx), 1e-12);
    }
  }
}

TEST(MvIndex, CcVisitsAreBounded) {
  DblpConfig cfg;
  cfg.students = 12;
  cfg.advisors_per_student = 3;
  auto db = load_project(gen_dblp(cfg));
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  std::size_t width = 0;
  for (const auto& c : idx.constituents) width = std::max(width, c.width);
  auto m = std::make_shared<ObddManager>(idx.order);
  auto g = query_obdd("Q() :- Advisor(s, 1)", tr, m);
  IntersectStats st;
  cc_mv_intersect(g, idx, &st);
  auto mt = metrics(g);
  EXPECT_LE(st.visited, (mt.max_rank - mt.min_rank + 1) * width);
}

TEST(MvIndex, InconsistentWhenWIsCertain) {
  ProjectText p;
  p.schema = "relation R(A:string) probabilistic\nrelation D(A:string) deterministic\n";
  p.data["R"] = "a\t1\n";
  p.data["D"] = "a\n";
  p.views = "VIEW V()[0] :- D(x)\n";
  auto db = load_project(p);
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  EXPECT_TRUE(idx.inconsistent());
  MvEvaluator ev(tr, idx, Engine::kCcMv);
  EXPECT_EQ(code_of([&] { query_probability(parse_query("Q() :- R(x)", tr.indb), tr, ev); }),
            ErrorCode::kInconsistentConstraints);
}

TEST(MvIndex, NoViewsGivesEmptyIndex) {
  auto db = fixtures::fig3();
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  EXPECT_TRUE(idx.constituents.empty());
  EXPECT_DOUBLE_EQ(idx.p0_not_w, 1.0);
  EXPECT_DOUBLE_EQ(idx.p0_w, 0.0);
  MvEvaluator ev(tr, idx, Engine::kCcMv);
  EXPECT_DOUBLE_EQ(query_probability(parse_query("Q() :- R(x), S(x,y)", tr.indb), tr, ev), 0.609375);
}

TEST(Serialize, RoundTripAndDeterminism) {
  DblpConfig cfg;
  cfg.students = 6;
  auto db = load_project(gen_dblp(cfg));
  auto tr = build_indb(db);
  auto idx = build_index(tr);
  auto bytes = serialize(idx);
  EXPECT_EQ(bytes, serialize(build_index(build_indb(load_project(gen_dblp(cfg))))));
  auto back = deserialize(bytes, &tr.indb);
  EXPECT_EQ(serialize(back), bytes);
  EXPECT_EQ(back.constituents.size(), idx.constituents.size());
  EXPECT_EQ(*back.order, *idx.order);
  MvEvaluator a(tr, idx, Engine::kCcMv), b(tr, back, Engine::kCcMv);
  auto q = parse_query(dblp_query_students_of("Madden"), tr.indb);
  auto ra = answer_query(q, tr, a), rb = answer_query(q, tr, b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i].probability, rb[i].probability);
}

TEST(Serialize, RejectsCorruption) {
  auto db = fixtures::example1(2, 3, 0.5);
  auto tr = build_indb(db);
  auto bytes = serialize(build_index(tr));
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  EXPECT_EQ(code_of([&] { deserialize(flipped); }), ErrorCode::kFormat);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 7);
  EXPECT_EQ(code_of([&] { deserialize(truncated); }), ErrorCode::kFormat);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize(magic); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([&] { deserialize({}); }), ErrorCode::kFormat);
}

TEST(Serialize, RejectsStaleIndex) {
  auto tr = build_indb(fixtures::example1(2, 3, 0.5));
  auto bytes = serialize(build_index(tr));
  auto other = build_indb(fixtures::example1(2, 4, 0.5));
  EXPECT_EQ(code_of([&] { deserialize(bytes, &other.indb); }), ErrorCode::kFormat);
  auto fig = build_indb(fixtures::fig3());
  EXPECT_EQ(code_of([&] { deserialize(bytes, &fig.indb); }), ErrorCode::kFormat);
  EXPECT_NO_THROW(deserialize(bytes, &tr.indb));
}
