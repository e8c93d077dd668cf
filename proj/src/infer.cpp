#include "permflow/infer.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "permflow/validate.hpp"

namespace permflow {

InferReport infer_system(const System& sys) {
  CheckedSystem checked = validate_system(sys);
  InferReport report;
  report.generated = gen_constraints(sys);
  const Generated& gen = report.generated;
  report.solution = solve(gen.system, sys.lattice);

  std::map<std::string, std::size_t> counts;
  for (const auto& c : gen.system.constraints) ++counts[c.function];

  for (const auto& name : checked.topo_order) {
    const FunDecl& f = *sys.find_function(name);
    const FunctionTerms& sig = gen.functions.at(name);
    FunctionInference fi;
    fi.function = name;
    fi.annotated = f.annotated();
    fi.constraint_count = counts[name];
    for (const auto& t : sig.params) {
      if (t->kind == TermNode::Kind::Var) fi.vars.push_back(t->var);
    }
    if (sig.ret->kind == TermNode::Kind::Var) fi.vars.push_back(sig.ret->var);
    if (report.solution.sat) {
      const Substitution& theta = report.solution.theta;
      FunctionType ft;
      for (const auto& t : sig.params) {
        ft.params.push_back(eval_term(t, sys.lattice, sys.perm_count(), theta));
      }
      ft.ret = eval_term(sig.ret, sys.lattice, sys.perm_count(), theta);
      fi.type = ft;
      report.table[name] = std::move(ft);
    }
    report.functions.push_back(std::move(fi));
  }

  if (!report.solution.sat) {
    std::set<std::string> blamed;
    for (std::size_t i : report.solution.unsat->core) {
      blamed.insert(gen.system.constraints[i].function);
    }
    report.blamed.assign(blamed.begin(), blamed.end());
    return report;
  }

  for (const auto& [cmd, v] : gen.letvars) report.letvars[cmd] = report.solution.theta.at(v);
  TraceChecker checker(sys, report.table, &report.letvars);
  for (const auto& name : checked.topo_order) {
    if (auto err = checker.check_function(*sys.find_function(name), report.table.at(name))) {
      throw std::logic_error("inferred type of " + name +
                             " does not check: " + err->to_string(sys));
    }
  }
  return report;
}

std::optional<LetVarTypes> infer_letvar_types(const System& sys, const FunDecl& f,
                                              const FunctionTable& ft) {
  GenOptions options;
  options.bodies = {f.qualified()};
  options.fixed = &ft;
  Generated gen = gen_constraints(sys, options);
  SolveOptions solve_options;
  solve_options.minimize_core = false;
  SolveResult res = solve(gen.system, sys.lattice, solve_options);
  if (!res.sat) return std::nullopt;
  LetVarTypes out;
  for (const auto& [cmd, v] : gen.letvars) out[cmd] = res.theta.at(v);
  return out;
}

namespace {

CmdPtr annotate_cmd(const CmdPtr& c, const LetVarTypes& letvars) {
  if (!c) return c;
  auto copy = std::make_shared<Cmd>(*c);
  if (c->kind == Cmd::Kind::LetVar && !c->var_type) {
    auto it = letvars.find(c.get());
    if (it != letvars.end()) copy->var_type = it->second;
  }
  copy->first = annotate_cmd(c->first, letvars);
  copy->second = annotate_cmd(c->second, letvars);
  return copy;
}

}  // namespace

System annotate_system(const System& sys, const InferReport& report) {
  if (!report.ok()) throw std::logic_error("cannot annotate from a failed inference");
  System out = sys;
  for (auto& f : out.functions) {
    const FunctionType& ft = report.table.at(f.qualified());
    for (std::size_t i = 0; i < f.params.size(); ++i) f.params[i].type = ft.params[i];
    f.ret_type = ft.ret;
    f.infer_marker = false;
    f.body = annotate_cmd(f.body, report.letvars);
  }
  return out;
}

}  // namespace permflow
