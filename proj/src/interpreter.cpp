#include "permflow/interpreter.hpp"

namespace permflow {

std::int64_t apply_binop(BinOp op, std::int64_t a, std::int64_t b) {
  // Arithmetic wraps modulo 2^64.
  auto ua = static_cast<std::uint64_t>(a);
  auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case BinOp::Add: return static_cast<std::int64_t>(ua + ub);
    case BinOp::Sub: return static_cast<std::int64_t>(ua - ub);
    case BinOp::Mul: return static_cast<std::int64_t>(ua * ub);
    case BinOp::Eq: return a == b ? 1 : 0;
    case BinOp::Lt: return a < b ? 1 : 0;
  }
  return 0;
}

std::int64_t Interpreter::eval_expr(const EvalEnv& env, const Expr& e) const {
  switch (e.kind) {
    case Expr::Kind::IntLit: return e.value;
    case Expr::Kind::Var: {
      auto it = env.find(e.name);
      if (it != env.end()) return it->second;
      if (const Constant* c = sys_.find_constant(e.name)) return c->value;
      throw UnboundVariable(e.name);
    }
    case Expr::Kind::BinOp:
      return apply_binop(e.op, eval_expr(env, *e.lhs), eval_expr(env, *e.rhs));
  }
  return 0;
}

void Interpreter::tick(const ExecContext& ctx) const {
  if (!ctx.fuel) return;
  if (*ctx.fuel == 0) throw FuelExhausted();
  --*ctx.fuel;
}

void Interpreter::exec_cmd(EvalEnv& env, const ExecContext& ctx, const Cmd& c) const {
  tick(ctx);
  switch (c.kind) {
    case Cmd::Kind::Assign:
      env[c.var] = eval_expr(env, *c.expr);
      return;
    case Cmd::Kind::If:
      exec_cmd(env, ctx, eval_expr(env, *c.expr) != 0 ? *c.first : *c.second);
      return;
    case Cmd::Kind::While:
      while (eval_expr(env, *c.expr) != 0) {
        exec_cmd(env, ctx, *c.first);
        tick(ctx);
      }
      return;
    case Cmd::Kind::Seq:
      exec_cmd(env, ctx, *c.first);
      exec_cmd(env, ctx, *c.second);
      return;
    case Cmd::Kind::LetVar:
      env[c.var] = eval_expr(env, *c.expr);
      exec_cmd(env, ctx, *c.first);
      env.erase(c.var);
      return;
    case Cmd::Kind::Call: {
      std::string callee = sys_.resolve_callee(ctx.app, c);
      const FunDecl* g = sys_.find_function(callee);
      if (!g) throw UnboundVariable(callee);
      EvalEnv callee_env;
      for (std::size_t i = 0; i < g->params.size(); ++i) {
        callee_env[g->params[i].name] = eval_expr(env, *c.args.at(i));
      }
      callee_env[kReturnVar] = 0;
      // The callee runs with the permissions of the app making the call; the
      // permissions of our own caller are not passed along.
      EvalEnv result = run_function(*g, std::move(callee_env), sys_.theta(ctx.app), ctx.fuel);
      env[c.var] = result.at(kReturnVar);
      return;
    }
    case Cmd::Kind::Test: {
      auto p = sys_.universe.perm(c.perm);
      exec_cmd(env, ctx, contains(ctx.caller_perms, p) ? *c.first : *c.second);
      return;
    }
  }
}

EvalEnv Interpreter::run_function(const FunDecl& f, EvalEnv env, PermSet caller_perms,
                                  std::uint64_t* fuel) const {
  ExecContext ctx{f.app, caller_perms, fuel};
  exec_cmd(env, ctx, *f.body);
  return env;
}

std::int64_t Interpreter::call_function(const std::string& qualified,
                                        const std::vector<std::int64_t>& args,
                                        PermSet caller_perms, std::uint64_t fuel) const {
  const FunDecl* f = sys_.find_function(qualified);
  if (!f) throw UnboundVariable(qualified);
  if (args.size() != f->params.size()) {
    throw std::invalid_argument(qualified + " expects " + std::to_string(f->params.size()) +
                                " arguments, got " + std::to_string(args.size()));
  }
  EvalEnv env;
  for (std::size_t i = 0; i < args.size(); ++i) env[f->params[i].name] = args[i];
  env[kReturnVar] = 0;
  std::uint64_t budget = fuel;
  return run_function(*f, std::move(env), caller_perms, &budget).at(kReturnVar);
}

}  // namespace permflow
