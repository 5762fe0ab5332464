#include <gtest/gtest.h>

#include "support.hpp"

using namespace mvdb;

namespace {

Mvdb with_numbers(const std::string& views) {
  ProjectText p;
  p.schema =
      "relation R(A:string) probabilistic\n"
      "relation N(A:string, n:int) deterministic\n"
      "relation D(A:string) deterministic\n";
  p.data["R"] = "a\t1\nb\t2\n";
  p.data["N"] = "a\t4\nb\t7\n";
  p.data["D"] = "a\n";
  p.views = views;
  return load_project(p);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kUsage;
}

}  // namespace

TEST(Translate, Example1) {
  auto db = fixtures::example1(2, 3, 0.5);
  auto tr = build_indb(db);
  ASSERT_EQ(tr.nv_relations.size(), 1u);
  RelId nv = tr.nv_relations[0];
  EXPECT_EQ(tr.indb.schema().relation(nv).name, "NV_V");
  EXPECT_EQ(tr.indb.schema().relation(nv).kind, RelationKind::kViewAux);
  ASSERT_EQ(tr.indb.relation_tuples(nv).size(), 1u);
  EXPECT_DOUBLE_EQ(tr.indb.weight(tr.indb.relation_tuples(nv)[0]), 1.0);
  ASSERT_EQ(tr.w.disjuncts.size(), 1u);
  EXPECT_EQ(tr.w.disjuncts[0].atoms.size(), 3u);
  EXPECT_EQ(tr.original_relations, 2u);
}

TEST(Translate, NvWeightsAreSigned) {
  auto db = fixtures::example1(2, 3, 4);
  auto tr = build_indb(db);
  TupleId t = tr.indb.relation_tuples(tr.nv_relations[0])[0];
  EXPECT_DOUBLE_EQ(tr.indb.weight(t), -0.75);
  EXPECT_DOUBLE_EQ(tr.indb.probability(t), -3.0);
}

TEST(Translate, DenialViewHasNoNvRelation) {
  auto db = with_numbers("VIEW V()[0] :- R(x), R(y), x != y\n");
  auto tr = build_indb(db);
  EXPECT_TRUE(tr.nv_relations.empty());
  EXPECT_EQ(tr.indb.schema().size(), db.instance.schema().size());
  ASSERT_EQ(tr.w.disjuncts.size(), 1u);
  auto phi = lineage(tr.w, tr.indb);
  EXPECT_EQ(phi.clauses.size(), 1u);
}

TEST(Translate, MixedViewGetsDenialGuard) {
  auto db = with_numbers("VIEW V(x)[n - 4] :- R(x), N(x, n)\n");
  auto tr = build_indb(db);
  ASSERT_EQ(tr.nv_relations.size(), 1u);
  EXPECT_EQ(tr.indb.relation_tuples(tr.nv_relations[0]).size(), 1u);
  auto nd = tr.indb.schema().find("ND_V");
  ASSERT_TRUE(nd);
  EXPECT_EQ(tr.indb.schema().relation(*nd).kind, RelationKind::kDeterministic);
  auto phi = lineage(tr.w, tr.indb);
  ASSERT_EQ(phi.clauses.size(), 2u);

  auto explicit_tr = build_indb(db, {true});
  auto nd2 = explicit_tr.indb.schema().find("ND_V");
  ASSERT_TRUE(nd2);
  EXPECT_EQ(explicit_tr.indb.schema().relation(*nd2).kind, RelationKind::kViewAux);
}

TEST(Translate, ExplicitDenialGivesSameProbabilities) {
  auto db = with_numbers("VIEW V(x)[n - 4] :- R(x), N(x, n)\n");
  auto q = parse_query("Q() :- R(\"a\")", db.instance);
  auto a = build_indb(db);
  auto b = build_indb(db, {true});
  IndbOracleEvaluator ea(a), eb(b);
  EXPECT_NEAR(query_probability(q, a, ea), query_probability(q, b, eb), 1e-12);
  EXPECT_NEAR(query_probability(q, a, ea), mln_probability(db, q), 1e-12);
}

TEST(Translate, InvalidViews) {
  EXPECT_EQ(code_of([] { build_indb(with_numbers("VIEW V(x)[0 - 1] :- R(x)\n")); }), ErrorCode::kInvalidView);
  EXPECT_EQ(code_of([] { build_indb(with_numbers("VIEW V()[n] :- R(x), N(x, n)\n")); }), ErrorCode::kInvalidView);
  EXPECT_EQ(code_of([] { build_indb(with_numbers("VIEW V(x)[1 / 0] :- R(x)\n")); }),
            ErrorCode::kUnsupportedHardConstraint);
}

TEST(Translate, QueriesMayNotUseNvRelations) {
  auto db = fixtures::example1(2, 3, 0.5);
  auto tr = build_indb(db);
  auto q = parse_query("Q() :- NV_V(x)", tr.indb);
  IndbOracleEvaluator ev(tr);
  EXPECT_EQ(code_of([&] { query_probability(q, tr, ev); }), ErrorCode::kInput);
}

TEST(Translate, InconsistentConstraints) {
  auto db = with_numbers("VIEW V()[0] :- D(x)\n");
  auto tr = build_indb(db);
  IndbOracleEvaluator ev(tr);
  auto q = parse_query("Q() :- R(x)", db.instance);
  EXPECT_EQ(code_of([&] { query_probability(q, tr, ev); }), ErrorCode::kInconsistentConstraints);
}

TEST(Translate, AnswerQueryCoversCandidates) {
  auto db = with_numbers("VIEW V(x)[2] :- R(x), N(x, n), n > 5\n");
  auto tr = build_indb(db);
  IndbOracleEvaluator ev(tr);
  auto q = parse_query("Q(x) :- R(x)", tr.indb);
  auto answers = answer_query(q, tr, ev);
  ASSERT_EQ(answers.size(), 2u);
  EXPECT_NEAR(answers[0].probability, 0.5, 1e-12);
  // Phi(b) = 2 * 2 vs Phi(not b) = 1
  EXPECT_NEAR(answers[1].probability, 0.8, 1e-12);
}
