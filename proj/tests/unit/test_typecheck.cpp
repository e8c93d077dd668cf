#include <gtest/gtest.h>

#include "permflow/parser.hpp"
#include "permflow/typecheck.hpp"
#include "permflow/validate.hpp"
#include "support.hpp"

using namespace permflow;
namespace pt = permflow::testing;

namespace {

System load(const std::string& path) {
  System sys = parse_system(pt::read_file(path));
  validate_system(sys);
  return sys;
}

const FunctionVerdict& verdict(const CheckReport& r, const std::string& f) {
  for (const auto& v : r.functions) {
    if (v.function == f) return v;
  }
  throw std::out_of_range(f);
}

}  // namespace

TEST(Typecheck, AcceptsAnnotatedContactProvider) {
  System sys = load(pt::corpus_dir() + "/annotated.pf");
  CheckReport r = check_system(sys);
  EXPECT_TRUE(r.ok());
}

TEST(Typecheck, LaunderingIsRejectedAtTheCall) {
  System sys = load(pt::corpus_dir() + "/negative/laundering.pf");
  CheckReport r = check_system(sys);
  const auto& f = verdict(r, "A.f");
  ASSERT_TRUE(f.error);
  EXPECT_EQ(f.error->kind, TypeErrorKind::CallArgViolation);
  EXPECT_EQ(f.error->witness, perm_bit(0));
  EXPECT_FALSE(verdict(r, "B.g").error);
  EXPECT_FALSE(verdict(r, "C.getsecret").error);
}

TEST(Typecheck, ReturnTooLowIsRejected) {
  System sys = load(pt::corpus_dir() + "/negative/leaky.pf");
  CheckReport r = check_system(sys);
  ASSERT_TRUE(verdict(r, "A.bad").error);
  EXPECT_EQ(verdict(r, "A.bad").error->kind, TypeErrorKind::SubtypeViolation);
}

TEST(Typecheck, RequiresAnnotations) {
  System sys = load(pt::corpus_dir() + "/getinfo.pf");
  try {
    check_system(sys);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), DiagnosticKind::MissingAnnotation);
  }
}

// A high guard in a permission-dependent branch is only a problem on the
// side of the test where the target is public.
TEST(Typecheck, TraceRulesSeeThroughTests) {
  System sys = parse_system(
      "lattice { levels L, H; order L < H; }\npermissions { p }\n"
      "app A { fun f(x : { {p}: H, _: L }) : { {p}: H, _: L } {"
      "  test(p) { if x == 0 then r := 1 else r := 2 } else r := x } }");
  validate_system(sys);
  EXPECT_TRUE(check_system(sys).ok());
  System bad = parse_system(
      "lattice { levels L, H; order L < H; }\npermissions { p }\n"
      "app A { fun f(x : H) : { {p}: H, _: L } {"
      "  test(p) r := 0 else { if x == 0 then r := 1 else r := 2 } } }");
  validate_system(bad);
  CheckReport r = check_system(bad);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.functions[0].error->trace, PermissionTrace::literal(0, Sign::Minus));
}
