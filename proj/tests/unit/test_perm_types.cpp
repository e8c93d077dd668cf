#include <gtest/gtest.h>

#include <random>

#include "permflow/diagnostics.hpp"
#include "permflow/perm_types.hpp"
#include "support.hpp"

using namespace permflow;
namespace pt = permflow::testing;

namespace {

Lattice two() { return Lattice::chain({"L", "H"}); }

}  // namespace

TEST(PermissionUniverse, ParseAndFormat) {
  PermissionUniverse u({"p", "q", "r"});
  EXPECT_EQ(u.parse_set("r,p"), perm_bit(0) | perm_bit(2));
  EXPECT_EQ(u.parse_set(""), 0);
  EXPECT_EQ(u.format(perm_bit(0) | perm_bit(2)), "{p,r}");
  EXPECT_EQ(u.format(0), "{}");
  EXPECT_THROW(u.parse_set("z"), InputError);
}

TEST(PermissionUniverse, CapsSize) {
  std::vector<std::string> names;
  for (int i = 0; i < 13; ++i) names.push_back("p" + std::to_string(i));
  try {
    PermissionUniverse u(names);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), DiagnosticKind::UniverseTooLarge);
  }
}

// The contact number type: H with READ_CONTACT, L without.
TEST(BaseType, PromoteDemoteProject) {
  Lattice lat = two();
  BaseType t = BaseType::from_table({0, 1});  // {} -> L, {p} -> H
  EXPECT_EQ(promote(t, 0), embed(1, 1));
  EXPECT_EQ(demote(t, 0), embed(0, 1));
  EXPECT_EQ(project(t, 1), embed(1, 1));
  EXPECT_EQ(project(t, 0), embed(0, 1));
  EXPECT_EQ(merge(0, embed(1, 1), embed(0, 1)), t);
  EXPECT_TRUE(bt_leq(lat, embed(0, 1), t));
  EXPECT_FALSE(bt_leq(lat, t, embed(0, 1)));
  EXPECT_EQ(bt_leq_witness(lat, t, embed(0, 1)), PermSet{1});
}

TEST(BaseType, FormatsAsLiteral) {
  Lattice lat = Lattice::load({{"L", "l1", "l2", "H"},
                               {{"L", "l1"}, {"L", "l2"}, {"l1", "H"}, {"l2", "H"}}});
  PermissionUniverse u({"p", "q"});
  // getInfo's type: {p,q} -> l1, {q} -> H, otherwise L.
  BaseType t = BaseType::from_table({0, 0, 3, 1});
  EXPECT_EQ(format_base_type(t, lat, u), "{ {p,q}: l1, {q}: H, _: L }");
  EXPECT_EQ(format_base_type(embed(3, 2), lat, u), "H");
}

TEST(BaseType, MixedUniversesAreAnError) {
  Lattice lat = two();
  EXPECT_THROW(bt_join(lat, embed(0, 1), embed(0, 2)), AlgebraError);
}

// (T, ≤) is a lattice: pointwise join and meet are the least upper and
// greatest lower bounds, checked against brute-force enumeration.
TEST(BaseType, PointwiseLatticeLaws) {
  std::mt19937_64 rng(pt::test_seed());
  for (const auto& [name, lat] : pt::lattice_catalog()) {
    for (std::size_t n = 0; n <= 2; ++n) {
      for (int i = 0; i < 40; ++i) {
        BaseType a = pt::random_type(rng, lat, n);
        BaseType b = pt::random_type(rng, lat, n);
        BaseType c = pt::random_type(rng, lat, n);
        BaseType j = bt_join(lat, a, b), m = bt_meet(lat, a, b);
        EXPECT_TRUE(bt_leq(lat, a, j) && bt_leq(lat, b, j));
        EXPECT_TRUE(bt_leq(lat, m, a) && bt_leq(lat, m, b));
        if (bt_leq(lat, a, c) && bt_leq(lat, b, c)) EXPECT_TRUE(bt_leq(lat, j, c));
        if (bt_leq(lat, c, a) && bt_leq(lat, c, b)) EXPECT_TRUE(bt_leq(lat, c, m));
        EXPECT_EQ(bt_leq(lat, a, b) && bt_leq(lat, b, a), a == b) << name;
      }
    }
  }
}

TEST(BaseType, ProjectionIsConstantAndStable) {
  std::mt19937_64 rng(pt::test_seed() + 1);
  Lattice lat = Lattice::chain({"L", "M", "H"});
  for (int i = 0; i < 200; ++i) {
    BaseType t = pt::random_type(rng, lat, 3);
    auto set = static_cast<PermSet>(rng() % 8);
    BaseType p = project(t, set);
    EXPECT_TRUE(p.is_constant());
    EXPECT_EQ(p.at(0), t.at(set));
    for (Perm q = 0; q < 3; ++q) {
      EXPECT_EQ(promote(p, q), p);
      EXPECT_EQ(demote(p, q), p);
    }
  }
}
