// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "permflow/infer.hpp"
#include "permflow/ni.hpp"
#include "permflow/oracle.hpp"
#include "permflow/parser.hpp"
#include "permflow/printer.hpp"
#include "permflow/solver.hpp"
#include "permflow/typecheck.hpp"
#include "permflow/validate.hpp"
#include "support.hpp"

using namespace permflow;
namespace pt = permflow::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

System load(const std::string& path) {
  System sys = parse_system(pt::read_file(path));
  validate_system(sys);
  return sys;
}

std::string corpus(const std::string& name) { return pt::corpus_dir() + "/" + name; }

bool all_annotated(const System& sys) {
  for (const auto& f : sys.functions) {
    if (!f.annotated()) return false;
  }
  return true;
}

const std::optional<TypeError>& error_of(const CheckReport& r, const std::string& f) {
  for (const auto& v : r.functions) {
    if (v.function == f) return v.error;
  }
  throw std::out_of_range(f);
}

std::string show(const BaseType& t, const System& sys) {
  return format_base_type(t, sys.lattice, sys.universe);
}

Outcome illustrative() {
  System sys = load(corpus("illustrative.pf"));
  InferReport r = infer_system(sys);
  if (!r.ok()) return {false, "inference failed"};
  const Lattice& lat = sys.lattice;
  Level lp = lat.level("lp"), lq = lat.level("lq");
  // Table order: {}, {p}, {q}, {p,q}.
  BaseType want = BaseType::from_table({lat.level("L"), lp, lq, lat.join(lp, lq)});
  const BaseType& got = r.table.at("A.f").ret;
  return {got == want, "A.f : " + format_function_type(r.table.at("A.f"), lat, sys.universe)};
}

Outcome get_info() {
  System sys = load(corpus("getinfo.pf"));
  InferReport r = infer_system(sys);
  if (!r.ok()) return {false, "inference failed"};
  const Lattice& lat = sys.lattice;
  BaseType want =
      BaseType::from_table({lat.level("L"), lat.level("L"), lat.level("H"), lat.level("l1")});
  const BaseType& got = r.table.at("Ads.getInfo").ret;
  return {got == want, "getInfo returns " + show(got, sys)};
}

Outcome get_contact() {
  System sys = load(corpus("getcontact.pf"));
  InferReport r = infer_system(sys);
  if (!r.ok()) return {false, "inference failed"};
  const Lattice& lat = sys.lattice;
  Perm rc = sys.universe.perm("READ_CONTACT");
  const BaseType& got = r.table.at("Contacts.getContactNo").ret;
  bool ok = true;
  for (PermSet P = 0; P < (1u << sys.perm_count()); ++P) {
    ok = ok && got.at(P) == (contains(P, rc) ? lat.level("H") : lat.level("L"));
  }
  return {ok, "getContactNo returns " + show(got, sys)};
}

Outcome laundering() {
  System sys = load(corpus("negative/laundering.pf"));
  CheckReport as_written = check_system(sys);
  const auto& f_err = error_of(as_written, "A.f");
  bool rejected = f_err && f_err->kind == TypeErrorKind::CallArgViolation;

  System fixed = sys;
  FunDecl* f = fixed.find_function("A.f");
  f->params[0].type = embed(fixed.lattice.level("L"), fixed.perm_count());
  CheckReport after = check_system(fixed);
  bool f_ok = !error_of(after, "A.f");
  bool main_rejected = error_of(after, "M.main").has_value();

  // No annotation of main works either: inference with main pinned public
  // has no solution.
  System open = fixed;
  open.find_function("A.f")->params[0].type.reset();
  open.find_function("A.f")->ret_type.reset();
  open.find_function("A.f")->infer_marker = true;
  bool unsat = !infer_system(open).ok();

  std::ostringstream d;
  d << "A.f:t->L " << (rejected ? "CallArgViolation" : "accepted") << ", A.f:L->L "
    << (f_ok ? "accepted" : "rejected") << ", M.main:()->L " << (main_rejected ? "rejected" : "accepted")
    << ", infer with M.main pinned " << (unsat ? "unsat" : "sat");
  return {rejected && f_ok && main_rejected && unsat, d.str()};
}

Outcome noninterference() {
  std::size_t programs = 0, tested = 0, cells = 0, violations = 0, inconclusive = 0;
  for (const auto& path : pt::list_systems(pt::corpus_dir())) {
    ++programs;
    System sys = load(path);
    FunctionTable ft;
    if (all_annotated(sys)) {
      if (!check_system(sys).ok()) continue;
      ft = annotated_table(sys);
    } else {
      InferReport r = infer_system(sys);
      if (!r.ok()) continue;
      ft = r.table;
    }
    ++tested;
    NIReport report = nitest_system(sys, ft, NIConfig{});
    cells += report.cells.size();
    violations += report.count(NIVerdict::Violation);
    inconclusive += report.count(NIVerdict::Inconclusive);
  }
  System leaky = load(corpus("negative/leaky.pf"));
  NIReport caught = nitest_system(leaky, annotated_table(leaky), NIConfig{});
  bool power = caught.count(NIVerdict::Violation) > 0;
  std::ostringstream d;
  d << tested << "/" << programs << " programs, " << cells << " cells, " << violations
    << " violations, " << inconclusive << " inconclusive; leaky program "
    << (power ? "violates" : "passes");
  return {programs >= 12 && tested == programs && violations == 0 && inconclusive == 0 && power,
          d.str()};
}

Outcome differential() {
  std::mt19937_64 rng(pt::test_seed() + 1000);
  int disagreements = 0, sat = 0;
  const int total = 1000;
  for (int i = 0; i < total; ++i) {
    const auto& lat = pt::lattice_catalog()[rng() % pt::lattice_catalog().size()].lattice;
    const std::size_t n = rng() % 4;
    ConstraintSystem cs = pt::random_constraints(rng, lat, n, {1 + rng() % 4, 1 + rng() % 10});
    SolveResult r = solve(cs, lat, {false});
    OracleResult o = oracle_solve(cs, lat);
    if (r.sat != o.sat || (r.sat && r.theta != o.theta)) ++disagreements;
    sat += r.sat;
  }
  return {disagreements == 0, std::to_string(total) + " instances, " + std::to_string(sat) +
                                  " satisfiable, " + std::to_string(disagreements) +
                                  " disagreements"};
}

Outcome trace_algebra() {
  std::mt19937_64 rng(pt::test_seed() + 2000);
  const int total = 10000;
  int failures = 0;
  for (int i = 0; i < total; ++i) {
    const auto& lat = pt::lattice_catalog()[rng() % pt::lattice_catalog().size()].lattice;
    const std::size_t n = 1 + rng() % 4;
    BaseType t = pt::random_type(rng, lat, n);
    Perm p = static_cast<Perm>(rng() % n);
    Sign s = rng() % 2 ? Sign::Plus : Sign::Minus;
    Sign s2 = rng() % 2 ? Sign::Plus : Sign::Minus;
    bool ok = true;

    // Different permissions commute.
    if (n > 1) {
      Perm q = static_cast<Perm>((p + 1 + rng() % (n - 1)) % n);
      ok = ok && pt::apply_sequence(t, {{p, s}, {q, s2}}) == pt::apply_sequence(t, {{q, s2}, {p, s}});
    }
    // A literal on a permission the trace does not mention moves past it.
    pt::Literals lits = pt::random_literals(rng, n, 6);
    pt::Literals without;
    for (const auto& l : lits) {
      if (l.first != p) without.push_back(l);
    }
    pt::Literals front{{p, s}};
    front.insert(front.end(), without.begin(), without.end());
    pt::Literals back = without;
    back.push_back({p, s});
    ok = ok && pt::apply_sequence(t, front) == pt::apply_sequence(t, back);
    // Only the first literal on a permission takes effect.
    ok = ok && pt::apply_sequence(t, {{p, s}, {p, s2}}) == pt::apply_sequence(t, {{p, s}});
    ok = ok && trace_apply(trace_apply(t, PermissionTrace::literal(p, s)),
                           PermissionTrace::literal(p, s2)) ==
                   trace_apply(t, PermissionTrace::literal(p, s));
    // Canonical traces: agree with the sequence, and applying twice is
    // applying once.
    PermissionTrace trace;
    for (const auto& [q, sign] : lits) trace = trace.extended(q, sign);
    BaseType once = trace_apply(t, trace);
    ok = ok && once == pt::apply_sequence(t, lits) && trace_apply(once, trace) == once;
    // Promotion is invisible on sets holding p, demotion on sets without it.
    BaseType up = promote(t, p), down = demote(t, p);
    for (PermSet P = 0; P < (1u << n); ++P) {
      ok = ok && (contains(P, p) ? up.at(P) == t.at(P) : down.at(P) == t.at(P));
    }
    failures += !ok;
  }
  return {failures == 0,
          std::to_string(total) + " instances, " + std::to_string(failures) + " counterexamples"};
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(PERMFLOW_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome roundtrip() {
  std::size_t total = 0, passed = 0;
  std::string failed;
  auto dir = std::filesystem::temp_directory_path() / "permflow_acceptance";
  std::filesystem::create_directories(dir);
  for (const auto& path : pt::list_systems(pt::corpus_dir())) {
    ++total;
    auto out = dir / std::filesystem::path(path).filename();
    if (run_cli("infer " + path + " --emit-annotated " + out.string()) == 0 &&
        run_cli("check " + out.string()) == 0) {
      ++passed;
    } else {
      failed += " " + std::filesystem::path(path).filename().string();
    }
  }
  return {total > 0 && passed == total,
          std::to_string(passed) + "/" + std::to_string(total) + " systems" +
              (failed.empty() ? "" : ", failed:" + failed)};
}

// Every command and expression of at most `budget` nodes over the variables
// in scope. Letvars introduce y0, y1, ...
class TinyPrograms {
 public:
  explicit TinyPrograms(std::size_t budget) : budget_(budget) {}

  std::vector<CmdPtr> commands() {
    std::vector<CmdPtr> out;
    for (std::size_t n = 1; n <= budget_; ++n) {
      auto cs = cmds(n, {"x", kReturnVar});
      out.insert(out.end(), cs.begin(), cs.end());
    }
    return out;
  }

 private:
  using Scope = std::vector<std::string>;

  std::vector<ExprPtr> exprs(std::size_t n, const Scope& scope) {
    std::vector<ExprPtr> out;
    if (n == 1) {
      out.push_back(Expr::lit(0));
      for (const auto& v : scope) out.push_back(Expr::var(v));
      return out;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (const auto& a : exprs(i, scope)) {
        for (const auto& b : exprs(n - 1 - i, scope)) out.push_back(Expr::bin(BinOp::Add, a, b));
      }
    }
    return out;
  }

  std::vector<CmdPtr> cmds(std::size_t n, const Scope& scope) {
    std::vector<CmdPtr> out;
    if (n < 2) return out;
    // v := e and v := call B.g(e)
    for (const auto& v : scope) {
      for (const auto& e : exprs(n - 1, scope)) {
        out.push_back(Cmd::assign(v, e));
        out.push_back(Cmd::call(v, "B", "g", {e}));
      }
    }
    // Two sub-commands: seq and test.
    for (std::size_t i = 2; i + 2 < n; ++i) {
      for (const auto& a : cmds(i, scope)) {
        for (const auto& b : cmds(n - 1 - i, scope)) {
          out.push_back(Cmd::seq(a, b));
          out.push_back(Cmd::test("p", a, b));
        }
      }
    }
    // Condition and sub-commands: while and if.
    for (std::size_t i = 1; i + 2 < n; ++i) {
      auto conds = exprs(i, scope);
      for (const auto& body : cmds(n - 1 - i, scope)) {
        for (const auto& e : conds) out.push_back(Cmd::while_(e, body));
      }
      for (std::size_t j = 2; i + j + 2 < n; ++j) {
        for (const auto& a : cmds(j, scope)) {
          for (const auto& b : cmds(n - 1 - i - j, scope)) {
            for (const auto& e : conds) out.push_back(Cmd::if_(e, a, b));
          }
        }
      }
    }
    // letvar y = e in c
    Scope inner = scope;
    std::string y = "y" + std::to_string(scope.size() - 2);
    inner.push_back(y);
    for (std::size_t i = 1; i + 2 < n; ++i) {
      for (const auto& e : exprs(i, scope)) {
        for (const auto& body : cmds(n - 1 - i, inner)) out.push_back(Cmd::letvar(y, e, body));
      }
    }
    return out;
  }

  std::size_t budget_;
};

Outcome equivalence() {
  const std::size_t kNodes = 6;
  std::vector<CmdPtr> bodies = TinyPrograms(kNodes).commands();
  Lattice lat = Lattice::chain({"L", "H"});
  std::vector<BaseType> types;
  for (Level a = 0; a < 2; ++a) {
    for (Level b = 0; b < 2; ++b) types.push_back(BaseType::from_table({a, b}));
  }
  std::size_t checks = 0, disagreements = 0, accepted = 0;
  std::string example;
  for (PermSet theta : {PermSet{0}, PermSet{1}}) {
    for (const auto& callee_param : {types[0], types[2]}) {
      for (const auto& callee_ret : {types[0], types[3]}) {
        System sys;
        sys.lattice = lat;
        sys.universe = PermissionUniverse({"p"});
        sys.apps = {{"A", theta, {}}, {"B", 0, {}}};
        FunDecl g;
        g.app = "B";
        g.name = "g";
        g.params = {{"z", callee_param, {}}};
        g.ret_type = callee_ret;
        g.body = Cmd::assign(kReturnVar, Expr::lit(0));
        FunDecl f;
        f.app = "A";
        f.name = "f";
        f.params = {{"x", std::nullopt, {}}};
        sys.functions = {g, f};
        FunctionTable ft;
        ft["B.g"] = {{callee_param}, callee_ret};
        for (const auto& body : bodies) {
          FunDecl& fd = *sys.find_function("A.f");
          fd.body = body;
          bool has_call = false;
          std::function<void(const Cmd&)> scan = [&](const Cmd& c) {
            has_call = has_call || c.kind == Cmd::Kind::Call;
            if (c.first) scan(*c.first);
            if (c.second) scan(*c.second);
          };
          scan(*body);
          // Callee and app permissions only matter when there is a call.
          if (!has_call && (theta != 0 || callee_param != types[0] || callee_ret != types[0])) {
            continue;
          }
          pt::DerivationSearch search(sys, ft);
          for (const auto& tx : types) {
            for (const auto& tr : types) {
              FunctionType type{{tx}, tr};
              fd.params[0].type = tx;
              fd.ret_type = tr;
              ft["A.f"] = type;
              bool trace_ok = !check_function(sys, ft, "A.f");
              bool declarative = search.function_typable(fd, type);
              ++checks;
              accepted += trace_ok;
              if (trace_ok != declarative) {
                if (example.empty()) {
                  example = print_system(sys);
                }
                ++disagreements;
              }
            }
          }
          fd.params[0].type.reset();
          fd.ret_type.reset();
        }
      }
    }
  }
  if (!example.empty()) std::cerr << "first disagreement:\n" << example;
  return {disagreements == 0 && checks > 0,
          std::to_string(bodies.size()) + " bodies, " + std::to_string(checks) + " judgments, " +
              std::to_string(accepted) + " accepted, " + std::to_string(disagreements) +
              " disagreements"};
}

struct Criterion {
  int number;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const double kNoLimit = 0;
  std::vector<Criterion> criteria = {
      {1, "two-test example infers the merged type", 1, illustrative},
      {2, "getInfo infers the expected table", 1, get_info},
      {3, "getContactNo is H exactly with READ_CONTACT", 1, get_contact},
      {4, "parameter laundering is rejected", kNoLimit, laundering},
      {5, "corpus is noninterferent, leaky program is caught", 60, noninterference},
      {6, "solver agrees with the fixpoint oracle", 120, differential},
      {7, "trace algebra laws", 30, trace_algebra},
      {8, "infer --emit-annotated then check", 30, roundtrip},
      {9, "trace rules match declarative derivations", kNoLimit, equivalence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = c.limit_seconds == kNoLimit || secs < c.limit_seconds;
    bool pass = o.pass && in_time;
    failed += !pass;
    char timing[64];
    if (c.limit_seconds == kNoLimit) {
      std::snprintf(timing, sizeof timing, "%.3fs", secs);
    } else {
      std::snprintf(timing, sizeof timing, "%.3fs < %.0fs", secs, c.limit_seconds);
    }
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " ("
              << timing << (in_time ? "" : " exceeded") << ") " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
