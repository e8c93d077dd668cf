#include "permflow/typecheck.hpp"

#include "permflow/infer.hpp"
#include "permflow/validate.hpp"

namespace permflow {

namespace {

struct Violation {
  TypeError error;
};

}  // namespace

const char* to_string(TypeErrorKind kind) {
  switch (kind) {
    case TypeErrorKind::SubtypeViolation: return "SubtypeViolation";
    case TypeErrorKind::CallArgViolation: return "CallArgViolation";
    case TypeErrorKind::ReturnViolation: return "ReturnViolation";
    case TypeErrorKind::AnnotationMismatch: return "AnnotationMismatch";
  }
  return "?";
}

std::string TypeError::to_string(const System& sys) const {
  std::string out = function + " " + span.to_string() + ": " + permflow::to_string(kind) + ": " +
                    message;
  if (kind == TypeErrorKind::AnnotationMismatch) return out;
  out += "; " + format_base_type(lhs, sys.lattice, sys.universe) + " is not below " +
         format_base_type(rhs, sys.lattice, sys.universe) + " under trace " +
         trace.format(sys.universe) + " (witness " + sys.universe.format(witness) + ")";
  return out;
}

void TraceChecker::require(TypeErrorKind kind, const Cmd& at, const BaseType& lhs,
                           const BaseType& rhs, const PermissionTrace& trace,
                           const std::string& what) const {
  auto witness = leq_under_witness(sys_.lattice, lhs, rhs, trace);
  if (!witness) return;
  TypeError err;
  err.kind = kind;
  err.function = current_ ? current_->qualified() : "";
  err.span = at.span;
  err.message = what;
  err.lhs = lhs;
  err.rhs = rhs;
  err.trace = trace;
  err.witness = *witness;
  throw Violation{err};
}

BaseType TraceChecker::type_expr(const TypingEnv& env, const PermissionTrace& trace,
                                 const Expr& e) const {
  switch (e.kind) {
    case Expr::Kind::IntLit: return embed(sys_.lattice.bottom(), sys_.perm_count());
    case Expr::Kind::Var: {
      auto it = env.find(e.name);
      if (it != env.end()) return it->second;
      if (const Constant* c = sys_.find_constant(e.name)) return c->type;
      throw std::logic_error("untyped variable '" + e.name + "'");
    }
    case Expr::Kind::BinOp:
      return bt_join(sys_.lattice, type_expr(env, trace, *e.lhs), type_expr(env, trace, *e.rhs));
  }
  return {};
}

BaseType TraceChecker::check_cmd(TypingEnv& env, const PermissionTrace& trace,
                                 const std::string& app, const Cmd& c) const {
  const Lattice& lat = sys_.lattice;
  switch (c.kind) {
    case Cmd::Kind::Assign: {
      BaseType t = type_expr(env, trace, *c.expr);
      const BaseType& target = env.at(c.var);
      require(TypeErrorKind::SubtypeViolation, c, t, target, trace,
              "value assigned to '" + c.var + "' is too sensitive");
      return target;
    }
    case Cmd::Kind::LetVar: {
      BaseType s = type_expr(env, trace, *c.expr);
      BaseType declared = s;
      if (c.var_type) {
        declared = *c.var_type;
      } else if (letvars_) {
        auto it = letvars_->find(&c);
        if (it != letvars_->end()) declared = it->second;
      }
      require(TypeErrorKind::SubtypeViolation, c, s, declared, trace,
              "initializer of letvar '" + c.var + "' is too sensitive");
      env[c.var] = declared;
      BaseType t = check_cmd(env, trace, app, *c.first);
      env.erase(c.var);
      return t;
    }
    case Cmd::Kind::If: {
      BaseType t = type_expr(env, trace, *c.expr);
      BaseType t1 = check_cmd(env, trace, app, *c.first);
      BaseType t2 = check_cmd(env, trace, app, *c.second);
      BaseType both = bt_meet(lat, t1, t2);
      require(TypeErrorKind::SubtypeViolation, c, t, both, trace,
              "branch condition flows into less sensitive writes");
      return both;
    }
    case Cmd::Kind::While: {
      BaseType s = type_expr(env, trace, *c.expr);
      BaseType t = check_cmd(env, trace, app, *c.first);
      require(TypeErrorKind::SubtypeViolation, c, s, t, trace,
              "loop condition flows into less sensitive writes");
      return t;
    }
    case Cmd::Kind::Seq: {
      BaseType t1 = check_cmd(env, trace, app, *c.first);
      BaseType t2 = check_cmd(env, trace, app, *c.second);
      return bt_meet(lat, t1, t2);
    }
    case Cmd::Kind::Call: {
      std::string callee = sys_.resolve_callee(app, c);
      auto ft = ft_.find(callee);
      if (ft == ft_.end()) throw std::logic_error("no type for callee " + callee);
      PermSet theta = sys_.theta(app);
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        BaseType s = type_expr(env, trace, *c.args[i]);
        require(TypeErrorKind::CallArgViolation, c, s, project(ft->second.params.at(i), theta),
                trace,
                "argument " + std::to_string(i + 1) + " of call to " + callee +
                    " exceeds the parameter type at the caller's permissions " +
                    sys_.universe.format(theta));
      }
      const BaseType& target = env.at(c.var);
      require(TypeErrorKind::ReturnViolation, c, project(ft->second.ret, theta), target, trace,
              "result of " + callee + " is too sensitive for '" + c.var + "'");
      return target;
    }
    case Cmd::Kind::Test: {
      Perm p = sys_.universe.perm(c.perm);
      BaseType t1 = check_cmd(env, trace.extended(p, Sign::Plus), app, *c.first);
      BaseType t2 = check_cmd(env, trace.extended(p, Sign::Minus), app, *c.second);
      return merge(p, t1, t2);
    }
  }
  return {};
}

std::optional<TypeError> TraceChecker::check_function(const FunDecl& f,
                                                      const FunctionType& type) const {
  current_ = &f;
  TypeError mismatch;
  mismatch.kind = TypeErrorKind::AnnotationMismatch;
  mismatch.function = f.qualified();
  mismatch.span = f.span;
  if (type.params.size() != f.params.size()) {
    mismatch.message = "annotation has the wrong arity";
    return mismatch;
  }
  TypingEnv env;
  for (std::size_t i = 0; i < f.params.size(); ++i) env[f.params[i].name] = type.params[i];
  env[kReturnVar] = type.ret;
  for (const auto& [name, t] : env) {
    if (t.perm_count() != sys_.perm_count()) {
      mismatch.message = "type of '" + name + "' is over a different permission universe";
      return mismatch;
    }
  }
  try {
    check_cmd(env, PermissionTrace::epsilon(), f.app, *f.body);
  } catch (const Violation& v) {
    return v.error;
  }
  return std::nullopt;
}

bool CheckReport::ok() const {
  for (const auto& f : functions) {
    if (f.error) return false;
  }
  return true;
}

FunctionTable annotated_table(const System& sys) {
  FunctionTable ft;
  std::vector<Diagnostic> missing;
  for (const auto& f : sys.functions) {
    if (auto a = f.annotation()) {
      ft[f.qualified()] = *a;
    } else {
      missing.push_back({DiagnosticKind::MissingAnnotation, f.span,
                         "function " + f.qualified() + " has no type annotation"});
    }
  }
  if (!missing.empty()) throw InputError(std::move(missing));
  return ft;
}

std::optional<TypeError> check_function(const System& sys, const FunctionTable& ft,
                                        const std::string& name) {
  const FunDecl* f = sys.find_function(name);
  if (!f) throw std::invalid_argument("unknown function " + name);
  const FunctionType& type = ft.at(name);
  // With every letvar annotated the rules are syntax directed. Otherwise pick
  // letvar types by solving the body's constraints with the signature fixed;
  // if that has no solution, fall back to the initializer types so the
  // reported error points at a concrete rule.
  std::optional<LetVarTypes> letvars;
  if (has_unannotated_letvar(*f->body)) letvars = infer_letvar_types(sys, *f, ft);
  TraceChecker checker(sys, ft, letvars ? &*letvars : nullptr);
  return checker.check_function(*f, type);
}

CheckReport check_system(const System& sys) {
  CheckedSystem checked = validate_system(sys);
  FunctionTable ft = annotated_table(sys);
  CheckReport report;
  for (const auto& name : checked.topo_order) {
    FunctionVerdict v;
    v.function = name;
    v.type = ft.at(name);
    v.error = check_function(sys, ft, name);
    report.functions.push_back(std::move(v));
  }
  return report;
}

}  // namespace permflow
