#include "permflow/ast.hpp"

namespace permflow {

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "==";
    case BinOp::Lt: return "<";
  }
  return "?";
}

ExprPtr Expr::lit(std::int64_t v, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::IntLit;
  e->value = v;
  e->span = span;
  return e;
}

ExprPtr Expr::var(std::string name, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr Expr::bin(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::BinOp;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->span = span;
  return e;
}

CmdPtr Cmd::assign(std::string x, ExprPtr e, SourceSpan span) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::Assign;
  c->var = std::move(x);
  c->expr = std::move(e);
  c->span = span;
  return c;
}

CmdPtr Cmd::if_(ExprPtr cond, CmdPtr then_c, CmdPtr else_c, SourceSpan span) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::If;
  c->expr = std::move(cond);
  c->first = std::move(then_c);
  c->second = std::move(else_c);
  c->span = span;
  return c;
}

CmdPtr Cmd::while_(ExprPtr cond, CmdPtr body, SourceSpan span) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::While;
  c->expr = std::move(cond);
  c->first = std::move(body);
  c->span = span;
  return c;
}

CmdPtr Cmd::seq(CmdPtr a, CmdPtr b, SourceSpan span) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::Seq;
  c->first = std::move(a);
  c->second = std::move(b);
  c->span = span;
  return c;
}

CmdPtr Cmd::letvar(std::string x, ExprPtr init, CmdPtr body, SourceSpan span,
                   std::optional<BaseType> type) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::LetVar;
  c->var = std::move(x);
  c->expr = std::move(init);
  c->first = std::move(body);
  c->var_type = std::move(type);
  c->span = span;
  return c;
}

CmdPtr Cmd::call(std::string x, std::string app, std::string fun, std::vector<ExprPtr> args,
                 SourceSpan span) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::Call;
  c->var = std::move(x);
  c->callee_app = std::move(app);
  c->callee_fun = std::move(fun);
  c->args = std::move(args);
  c->span = span;
  return c;
}

CmdPtr Cmd::test(std::string perm, CmdPtr yes, CmdPtr no, SourceSpan span) {
  auto c = std::make_shared<Cmd>();
  c->kind = Kind::Test;
  c->perm = std::move(perm);
  c->first = std::move(yes);
  c->second = std::move(no);
  c->span = span;
  return c;
}

std::optional<FunctionType> FunDecl::annotation() const {
  if (!ret_type) return std::nullopt;
  FunctionType ft;
  for (const auto& p : params) {
    if (!p.type) return std::nullopt;
    ft.params.push_back(*p.type);
  }
  ft.ret = *ret_type;
  return ft;
}

const AppDecl* System::find_app(const std::string& name) const {
  for (const auto& a : apps) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

PermSet System::theta(const std::string& app) const {
  const AppDecl* a = find_app(app);
  return a ? a->perms : 0;
}

const Constant* System::find_constant(const std::string& name) const {
  for (const auto& c : constants) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const FunDecl* System::find_function(const std::string& qualified) const {
  for (const auto& f : functions) {
    if (f.qualified() == qualified) return &f;
  }
  return nullptr;
}

FunDecl* System::find_function(const std::string& qualified) {
  for (auto& f : functions) {
    if (f.qualified() == qualified) return &f;
  }
  return nullptr;
}

std::string System::resolve_callee(const std::string& caller_app, const Cmd& call) const {
  return (call.callee_app.empty() ? caller_app : call.callee_app) + "." + call.callee_fun;
}

}  // namespace permflow
