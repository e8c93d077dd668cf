#include "permflow/constraints.hpp"

#include <algorithm>

#include "permflow/validate.hpp"

namespace permflow {

namespace {

Term make(TermNode node) { return std::make_shared<const TermNode>(std::move(node)); }

}  // namespace

Term var_term(VarId id) {
  TermNode n;
  n.kind = TermNode::Kind::Var;
  n.var = id;
  return make(std::move(n));
}

Term ground_term(BaseType t) {
  TermNode n;
  n.kind = TermNode::Kind::Ground;
  n.ground = std::move(t);
  return make(std::move(n));
}

Term join_term(Term a, Term b) {
  TermNode n;
  n.kind = TermNode::Kind::Join;
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

Term meet_term(Term a, Term b) {
  TermNode n;
  n.kind = TermNode::Kind::Meet;
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

Term merge_term(Perm p, Term a, Term b) {
  TermNode n;
  n.kind = TermNode::Kind::Merge;
  n.perm = p;
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

Term project_term(Term t, PermSet set) {
  TermNode n;
  n.kind = TermNode::Kind::Project;
  n.set = set;
  n.a = std::move(t);
  return make(std::move(n));
}

bool same_term(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermNode::Kind::Var: return a->var == b->var;
    case TermNode::Kind::Ground: return a->ground == b->ground;
    case TermNode::Kind::Join:
    case TermNode::Kind::Meet: return same_term(a->a, b->a) && same_term(a->b, b->b);
    case TermNode::Kind::Merge:
      return a->perm == b->perm && same_term(a->a, b->a) && same_term(a->b, b->b);
    case TermNode::Kind::Project: return a->set == b->set && same_term(a->a, b->a);
  }
  return false;
}

bool term_is_atomic(const Term& t) {
  return t->kind == TermNode::Kind::Var || t->kind == TermNode::Kind::Ground;
}

void collect_vars(const Term& t, std::vector<VarId>& out) {
  switch (t->kind) {
    case TermNode::Kind::Var:
      if (std::find(out.begin(), out.end(), t->var) == out.end()) out.push_back(t->var);
      return;
    case TermNode::Kind::Ground: return;
    default:
      collect_vars(t->a, out);
      if (t->b) collect_vars(t->b, out);
  }
}

BaseType eval_term(const Term& t, const Lattice& lat, std::size_t perm_count,
                   const Substitution& theta) {
  switch (t->kind) {
    case TermNode::Kind::Var: {
      auto it = theta.find(t->var);
      return it != theta.end() ? it->second : embed(lat.bottom(), perm_count);
    }
    case TermNode::Kind::Ground: return t->ground;
    case TermNode::Kind::Join:
      return bt_join(lat, eval_term(t->a, lat, perm_count, theta),
                     eval_term(t->b, lat, perm_count, theta));
    case TermNode::Kind::Meet:
      return bt_meet(lat, eval_term(t->a, lat, perm_count, theta),
                     eval_term(t->b, lat, perm_count, theta));
    case TermNode::Kind::Merge:
      return merge(t->perm, eval_term(t->a, lat, perm_count, theta),
                   eval_term(t->b, lat, perm_count, theta));
    case TermNode::Kind::Project:
      return project(eval_term(t->a, lat, perm_count, theta), t->set);
  }
  return {};
}

std::string format_term(const Term& t, const Lattice& lat, const PermissionUniverse& universe,
                        const std::vector<TypeVar>* vars) {
  switch (t->kind) {
    case TermNode::Kind::Var:
      if (vars && t->var < vars->size() && !(*vars)[t->var].name.empty()) {
        return "'" + (*vars)[t->var].name + "#" + std::to_string(t->var);
      }
      return "'a" + std::to_string(t->var);
    case TermNode::Kind::Ground: return format_base_type(t->ground, lat, universe);
    case TermNode::Kind::Join:
      return "(" + format_term(t->a, lat, universe, vars) + " | " +
             format_term(t->b, lat, universe, vars) + ")";
    case TermNode::Kind::Meet:
      return "(" + format_term(t->a, lat, universe, vars) + " & " +
             format_term(t->b, lat, universe, vars) + ")";
    case TermNode::Kind::Merge:
      return "merge(" + universe.name(t->perm) + ", " + format_term(t->a, lat, universe, vars) +
             ", " + format_term(t->b, lat, universe, vars) + ")";
    case TermNode::Kind::Project:
      return "app(" + format_term(t->a, lat, universe, vars) + ", " + universe.format(t->set) +
             ")";
  }
  return "?";
}

VarId ConstraintSystem::fresh(std::string function, std::string name, VarRole role,
                              SourceSpan span) {
  TypeVar v;
  v.id = static_cast<VarId>(vars.size());
  v.function = std::move(function);
  v.name = std::move(name);
  v.role = role;
  v.span = span;
  vars.push_back(std::move(v));
  return vars.back().id;
}

bool satisfies(const Lattice& lat, std::size_t perm_count, const Substitution& theta,
               const Constraint& c) {
  return leq_under(lat, eval_term(c.lhs, lat, perm_count, theta),
                   eval_term(c.rhs, lat, perm_count, theta), c.guard);
}

bool satisfies(const Lattice& lat, std::size_t perm_count, const Substitution& theta,
               const GenConstraint& c) {
  return bt_leq(lat, trace_apply(eval_term(c.lhs, lat, perm_count, theta), c.lguard),
                trace_apply(eval_term(c.rhs, lat, perm_count, theta), c.rguard));
}

std::string format_constraint(const Constraint& c, const Lattice& lat,
                              const PermissionUniverse& universe,
                              const std::vector<TypeVar>* vars) {
  return "(" + c.guard.format(universe) + ", " + format_term(c.lhs, lat, universe, vars) +
         " <= " + format_term(c.rhs, lat, universe, vars) + ")";
}

std::string format_constraint(const GenConstraint& c, const Lattice& lat,
                              const PermissionUniverse& universe,
                              const std::vector<TypeVar>* vars) {
  return "(" + c.lguard.format(universe) + ", " + format_term(c.lhs, lat, universe, vars) +
         " <= " + c.rguard.format(universe) + ", " + format_term(c.rhs, lat, universe, vars) +
         ")";
}

std::vector<GenConstraint> generalize(const std::vector<Constraint>& constraints) {
  std::vector<GenConstraint> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) out.push_back({c.guard, c.lhs, c.guard, c.rhs});
  return out;
}

bool has_unannotated_letvar(const Cmd& c) {
  if (c.kind == Cmd::Kind::LetVar && !c.var_type) return true;
  return (c.first && has_unannotated_letvar(*c.first)) ||
         (c.second && has_unannotated_letvar(*c.second));
}

namespace {

class Generator {
 public:
  Generator(const System& sys, Generated& out) : sys_(sys), out_(out) {}

  void body(const FunDecl& f) {
    fun_ = &f;
    const FunctionTerms& sig = out_.functions.at(f.qualified());
    env_.clear();
    for (std::size_t i = 0; i < f.params.size(); ++i) env_[f.params[i].name] = sig.params[i];
    env_[kReturnVar] = sig.ret;
    cmd(PermissionTrace::epsilon(), *f.body);
  }

 private:
  Term bottom() const { return ground_term(embed(sys_.lattice.bottom(), sys_.perm_count())); }

  void add(const PermissionTrace& guard, Term lhs, Term rhs, const Cmd& at) {
    out_.system.constraints.push_back(
        {guard, std::move(lhs), std::move(rhs), fun_->qualified(), at.span});
  }

  Term expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return bottom();
      case Expr::Kind::Var: {
        auto it = env_.find(e.name);
        if (it != env_.end()) return it->second;
        return ground_term(sys_.find_constant(e.name)->type);
      }
      case Expr::Kind::BinOp: return join_term(expr(*e.lhs), expr(*e.rhs));
    }
    return bottom();
  }

  Term cmd(const PermissionTrace& trace, const Cmd& c) {
    switch (c.kind) {
      case Cmd::Kind::Assign: {
        Term target = env_.at(c.var);
        add(trace, expr(*c.expr), target, c);
        return target;
      }
      case Cmd::Kind::LetVar: {
        Term s = expr(*c.expr);
        Term alpha;
        if (c.var_type) {
          alpha = ground_term(*c.var_type);
        } else {
          VarId v = out_.system.fresh(fun_->qualified(), c.var, VarRole::LetVar, c.span);
          out_.letvars[&c] = v;
          alpha = var_term(v);
        }
        add(trace, s, alpha, c);
        env_[c.var] = alpha;
        Term t = cmd(trace, *c.first);
        env_.erase(c.var);
        return t;
      }
      case Cmd::Kind::If: {
        Term t = expr(*c.expr);
        Term t1 = cmd(trace, *c.first);
        Term t2 = cmd(trace, *c.second);
        Term both = meet_term(t1, t2);
        add(trace, t, both, c);
        return both;
      }
      case Cmd::Kind::While: {
        Term s = expr(*c.expr);
        Term t = cmd(trace, *c.first);
        add(trace, s, t, c);
        return t;
      }
      case Cmd::Kind::Seq: {
        Term t1 = cmd(trace, *c.first);
        Term t2 = cmd(trace, *c.second);
        return meet_term(t1, t2);
      }
      case Cmd::Kind::Call: {
        std::string callee = sys_.resolve_callee(fun_->app, c);
        const FunctionTerms& sig = out_.functions.at(callee);
        PermSet theta = sys_.theta(fun_->app);
        for (std::size_t i = 0; i < c.args.size(); ++i) {
          add(trace, expr(*c.args[i]), project_term(sig.params.at(i), theta), c);
        }
        Term target = env_.at(c.var);
        add(trace, project_term(sig.ret, theta), target, c);
        return target;
      }
      case Cmd::Kind::Test: {
        Perm p = sys_.universe.perm(c.perm);
        Term t1 = cmd(trace.extended(p, Sign::Plus), *c.first);
        Term t2 = cmd(trace.extended(p, Sign::Minus), *c.second);
        return merge_term(p, t1, t2);
      }
    }
    return bottom();
  }

  const System& sys_;
  Generated& out_;
  const FunDecl* fun_ = nullptr;
  std::map<std::string, Term> env_;
};

}  // namespace

Generated gen_constraints(const System& sys, const GenOptions& options) {
  CheckedSystem checked = validate_system(sys);
  Generated out;
  out.system.perm_count = sys.perm_count();
  for (const auto& f : sys.functions) {
    FunctionTerms sig;
    std::optional<FunctionType> ground;
    if (options.fixed) {
      auto it = options.fixed->find(f.qualified());
      if (it != options.fixed->end()) ground = it->second;
    }
    if (!ground) ground = f.annotation();
    if (ground) {
      for (const auto& t : ground->params) sig.params.push_back(ground_term(t));
      sig.ret = ground_term(ground->ret);
    } else {
      for (const auto& p : f.params) {
        sig.params.push_back(
            var_term(out.system.fresh(f.qualified(), p.name, VarRole::Param, p.span)));
      }
      sig.ret = var_term(out.system.fresh(f.qualified(), kReturnVar, VarRole::Return, f.span));
    }
    out.functions[f.qualified()] = std::move(sig);
  }
  Generator gen(sys, out);
  for (const auto& name : checked.topo_order) {
    if (!options.bodies.empty() &&
        std::find(options.bodies.begin(), options.bodies.end(), name) == options.bodies.end()) {
      continue;
    }
    gen.body(*sys.find_function(name));
  }
  return out;
}

}  // namespace permflow
