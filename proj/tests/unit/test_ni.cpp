#include <gtest/gtest.h>

#include "permflow/infer.hpp"
#include "permflow/ni.hpp"
#include "permflow/parser.hpp"
#include "permflow/validate.hpp"
#include "support.hpp"

using namespace permflow;
namespace pt = permflow::testing;

namespace {

System load(const std::string& name) {
  System sys = parse_system(pt::read_file(pt::corpus_dir() + "/" + name));
  validate_system(sys);
  return sys;
}

}  // namespace

TEST(Indistinguishable, ObservableVariablesMustAgree) {
  Lattice lat = Lattice::chain({"L", "H"});
  TypingEnv gamma{{"x", embed(1, 1)}, {"y", embed(0, 1)}};
  EXPECT_TRUE(indistinguishable({{"x", 1}, {"y", 5}}, {{"x", 9}, {"y", 5}}, gamma, lat, 0));
  EXPECT_FALSE(indistinguishable({{"x", 1}, {"y", 5}}, {{"x", 1}, {"y", 6}}, gamma, lat, 0));
  EXPECT_TRUE(indistinguishable({{"x", 1}}, {{"x", 2}}, gamma, lat, 0));  // y undefined on both
  // Public without p, secret with p: x is not below L everywhere, so it is
  // not observable at L.
  TypingEnv dep{{"x", BaseType::from_table({0, 1})}};
  EXPECT_TRUE(indistinguishable({{"x", 1}}, {{"x", 2}}, dep, lat, 0));
  EXPECT_FALSE(indistinguishable({{"x", 1}}, {{"x", 2}}, project_env(dep, 0), lat, 0));
}

// Equivalence relation, monotonicity under projection, and the promotion and
// demotion laws, over random environments.
TEST(Indistinguishable, RelationProperties) {
  std::mt19937_64 rng(pt::test_seed() + 3);
  for (const auto& [name, lat] : pt::lattice_catalog()) {
    for (int i = 0; i < 60; ++i) {
      const std::size_t n = 1 + rng() % 2;
      TypingEnv gamma;
      for (const char* x : {"a", "b", "c"}) gamma[x] = pt::random_type(rng, lat, n);
      Level obs = pt::random_level(rng, lat);
      auto env = [&] {
        EvalEnv e;
        for (const auto& [x, t] : gamma) e[x] = static_cast<std::int64_t>(rng() % 2);
        return e;
      };
      EvalEnv e1 = env(), e2 = env(), e3 = env();
      EXPECT_TRUE(indistinguishable(e1, e1, gamma, lat, obs));
      EXPECT_EQ(indistinguishable(e1, e2, gamma, lat, obs), indistinguishable(e2, e1, gamma, lat, obs));
      if (indistinguishable(e1, e2, gamma, lat, obs) && indistinguishable(e2, e3, gamma, lat, obs)) {
        EXPECT_TRUE(indistinguishable(e1, e3, gamma, lat, obs));
      }
      for (PermSet P = 0; P < (1u << n); ++P) {
        // Projection can only make more variables observable.
        if (indistinguishable(e1, e2, project_env(gamma, P), lat, obs)) {
          EXPECT_TRUE(indistinguishable(e1, e2, gamma, lat, obs)) << name;
        }
        for (Perm p = 0; p < n; ++p) {
          TypingEnv moved;
          bool in = contains(P, p);
          for (const auto& [x, t] : gamma) moved[x] = in ? promote(t, p) : demote(t, p);
          EXPECT_EQ(indistinguishable(e1, e2, project_env(gamma, P), lat, obs),
                    indistinguishable(e1, e2, project_env(moved, P), lat, obs));
        }
      }
    }
  }
}

TEST(NITest, WellTypedContactProviderIsNoninterferent) {
  System sys = load("getcontact.pf");
  InferReport inferred = infer_system(sys);
  ASSERT_TRUE(inferred.ok());
  NIConfig cfg;
  NIReport r = nitest_system(sys, inferred.table, cfg);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.count(NIVerdict::Inconclusive), 0u);
  cfg.strict = true;
  EXPECT_TRUE(nitest_system(sys, inferred.table, cfg).ok());
}

TEST(NITest, LeakyFunctionIsCaught) {
  System sys = load("negative/leaky.pf");
  FunctionTable ft = annotated_table(sys);
  NIConfig cfg;
  cfg.domain_lo = 0;
  cfg.domain_hi = 1;
  NICell cell = nitest_cell(sys, ft, "A.bad", 0, sys.lattice.bottom(), cfg);
  ASSERT_EQ(cell.verdict, NIVerdict::Violation);
  const NIWitness& w = *cell.witness;
  EXPECT_NE(w.first.at("x"), w.second.at("x"));
  EvalEnv a = replay(sys, "A.bad", w.first, w.first_constants, 0, 1000);
  EvalEnv b = replay(sys, "A.bad", w.second, w.second_constants, 0, 1000);
  EXPECT_EQ(a.at("r"), w.first_out);
  EXPECT_EQ(b.at("r"), w.second_out);
  EXPECT_NE(a.at("r"), b.at("r"));
}

// With the unsound annotations, M.main hands the secret to a public result.
TEST(NITest, LaunderingAnnotationsLeakThroughMain) {
  System sys = load("negative/laundering.pf");
  FunctionTable ft = annotated_table(sys);
  NIConfig cfg;
  cfg.observers = {sys.lattice.bottom()};
  auto cells = nitest_function(sys, ft, "M.main", cfg);
  bool violated = false;
  for (const auto& c : cells) violated = violated || c.verdict == NIVerdict::Violation;
  EXPECT_TRUE(violated);
}

TEST(NITest, ConstantFunctionAndCaps) {
  System sys = load("constant.pf");
  InferReport inferred = infer_system(sys);
  NIConfig cfg;
  EXPECT_TRUE(nitest_system(sys, inferred.table, cfg).ok());
  cfg.pair_cap = 5;
  NICell cell = nitest_cell(sys, inferred.table, "A.k", 0, sys.lattice.top(), cfg);
  EXPECT_EQ(cell.verdict, NIVerdict::Inconclusive);
  EXPECT_EQ(cell.note, "SearchSpaceTooLarge");
}

TEST(NITest, FuelExhaustionIsInconclusive) {
  System sys = parse_system(
      "lattice { levels L, H; order L < H; }\n"
      "app A { fun spin(x : L) : L { while 0 < 1 do r := 0 } }");
  validate_system(sys);
  NIConfig cfg;
  cfg.fuel = 200;
  NICell cell = nitest_cell(sys, annotated_table(sys), "A.spin", 0, 0, cfg);
  EXPECT_EQ(cell.verdict, NIVerdict::Inconclusive);
  EXPECT_EQ(cell.note, "FuelExhausted");
}
