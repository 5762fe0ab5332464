#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace mvdb;

TEST(Oracle, Example1WorldWeights) {
  const double w1 = 2, w2 = 3, w = 0.5;
  auto db = fixtures::example1(w1, w2, w);
  MlnOracle mln(db);
  auto trace = mln.trace();
  ASSERT_EQ(trace.size(), 4u);
  EXPECT_DOUBLE_EQ(trace[0].weight, 1);
  EXPECT_DOUBLE_EQ(trace[1].weight, w1);
  EXPECT_DOUBLE_EQ(trace[2].weight, w2);
  EXPECT_DOUBLE_EQ(trace[3].weight, w * w1 * w2);
  EXPECT_DOUBLE_EQ(mln.partition_function(), 1 + w1 + w2 + w * w1 * w2);
}

TEST(Oracle, Example1ClosedForms) {
  const double w1 = 2, w2 = 3, w = 0.25;
  auto db = fixtures::example1(w1, w2, w);
  const double z = 1 + w1 + w2 + w * w1 * w2;
  auto p = [&](const std::string& q) { return mln_probability(db, parse_query(q, db.instance)); };
  EXPECT_NEAR(p("Q() :- R(\"a\")"), (w1 + w * w1 * w2) / z, 1e-15);
  EXPECT_NEAR(p("Q() :- R(x), S(x)"), w * w1 * w2 / z, 1e-15);
  EXPECT_NEAR(p("Q() :- R(x) ; S(x)"), (w1 + w2 + w * w1 * w2) / z, 1e-15);
}

TEST(Oracle, SevenWorldTable) {
  auto db = fixtures::example1(2, 3, 0.5);
  auto tr = build_indb(db);
  std::vector<TupleId> vars = {fixtures::tuple_named(tr.indb, "R", {"a"}), fixtures::tuple_named(tr.indb, "S", {"a"}),
                               fixtures::tuple_named(tr.indb, "NV_V", {"a"})};
  double by_rs[4] = {0, 0, 0, 0};
  std::size_t kept = 0;
  for (const auto& ww : indb_trace(tr.indb, vars)) {
    if (ww.world == 7) continue;  // the only world satisfying W
    ++kept;
    by_rs[ww.world & 3] += ww.weight;
  }
  EXPECT_EQ(kept, 7u);
  EXPECT_EQ(by_rs[0], 2.0);
  EXPECT_EQ(by_rs[1], 4.0);
  EXPECT_EQ(by_rs[2], 6.0);
  EXPECT_EQ(by_rs[3], 6.0);
}

TEST(Oracle, KahanBeatsNaiveSummation) {
  KahanSum k;
  double naive = 0;
  k.add(1.0);
  naive += 1.0;
  for (int i = 0; i < 1000000; ++i) {
    k.add(1e-16);
    naive += 1e-16;
  }
  EXPECT_EQ(naive, 1.0);
  EXPECT_NEAR(k.sum, 1.0 + 1e-10, 1e-15);
}

TEST(Oracle, WorldCap) {
  auto db = fixtures::fig3();
  try {
    MlnOracle mln(db, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapExceeded);
  }
  EXPECT_NO_THROW(MlnOracle(db, 64));
}

TEST(Oracle, Theorem1OnRandomMvdbs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto r = fixtures::random_mvdb(rng);
    auto tr = build_indb(r.db);
    IndbOracleEvaluator ev(tr);
    for (const auto& text : r.queries) {
      auto q = parse_query(text, r.db.instance);
      auto t1 = theorem1_check(r.db, q);
      EXPECT_LE(t1.delta, 1e-9) << text;
      EXPECT_NEAR(query_probability(q, tr, ev), t1.lhs, 1e-9) << text;
    }
  }
}

TEST(Oracle, IndbProbabilityOfObddMatchesLineage) {
  auto db = fixtures::example1(2, 3, 4);
  auto tr = build_indb(db);
  auto phi = lineage(tr.w, tr.indb);
  auto order = std::make_shared<VariableOrder>(tuple_order(tr.indb, PermutationSet::identity(tr.indb.schema())));
  auto m = std::make_shared<ObddManager>(order);
  auto g = from_lineage(phi, m);
  EXPECT_NEAR(indb_probability(tr.indb, g), indb_probability(tr.indb, phi), 1e-15);
  // P0(W) = p1 p2 p0 with p0 = w0 / (1 + w0) = -3
  EXPECT_NEAR(indb_probability(tr.indb, phi), (2.0 / 3) * 0.75 * -3.0, 1e-15);
}
