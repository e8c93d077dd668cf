#include "permflow/validate.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace permflow {

namespace {

class FunctionChecker {
 public:
  FunctionChecker(const System& sys, const FunDecl& f, std::vector<Diagnostic>& diags)
      : sys_(sys), f_(f), diags_(diags) {}

  void run() {
    bound_.insert(kReturnVar);
    if (sys_.find_constant(kReturnVar)) {
      error(DiagnosticKind::DuplicateName, f_.span, "constant 'r' clashes with the result variable");
    }
    for (const auto& p : f_.params) {
      if (p.name == kReturnVar || sys_.find_constant(p.name) || !bound_.insert(p.name).second) {
        error(DiagnosticKind::DuplicateName, p.span,
              "parameter '" + p.name + "' of " + f_.qualified() + " is already bound");
      }
      scope_.push_back(p.name);
    }
    scope_.push_back(kReturnVar);
    cmd(*f_.body);
  }

  std::vector<std::string> callees;

 private:
  void error(DiagnosticKind kind, SourceSpan span, std::string msg) {
    diags_.push_back({kind, span, std::move(msg)});
  }

  bool in_scope(const std::string& x) const {
    return std::find(scope_.begin(), scope_.end(), x) != scope_.end();
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return;
      case Expr::Kind::Var:
        if (!in_scope(e.name) && !sys_.find_constant(e.name)) {
          error(DiagnosticKind::OpenFunction, e.span,
                "free variable '" + e.name + "' in " + f_.qualified());
        }
        return;
      case Expr::Kind::BinOp:
        expr(*e.lhs);
        expr(*e.rhs);
        return;
    }
  }

  void target(const std::string& x, SourceSpan span) {
    if (in_scope(x)) return;
    if (sys_.find_constant(x)) {
      error(DiagnosticKind::AssignToConstant, span, "assignment to constant '" + x + "'");
    } else {
      error(DiagnosticKind::OpenFunction, span,
            "assignment to undeclared variable '" + x + "' in " + f_.qualified());
    }
  }

  static bool mentions(const Expr& e, const std::string& x) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return false;
      case Expr::Kind::Var: return e.name == x;
      case Expr::Kind::BinOp: return mentions(*e.lhs, x) || mentions(*e.rhs, x);
    }
    return false;
  }

  void cmd(const Cmd& c) {
    switch (c.kind) {
      case Cmd::Kind::Assign:
        expr(*c.expr);
        target(c.var, c.span);
        return;
      case Cmd::Kind::If:
        expr(*c.expr);
        cmd(*c.first);
        cmd(*c.second);
        return;
      case Cmd::Kind::While:
        expr(*c.expr);
        cmd(*c.first);
        return;
      case Cmd::Kind::Seq:
        cmd(*c.first);
        cmd(*c.second);
        return;
      case Cmd::Kind::LetVar:
        if (mentions(*c.expr, c.var)) {
          error(DiagnosticKind::LetVarSelfReference, c.span,
                "letvar '" + c.var + "' occurs in its own initializer");
        } else {
          expr(*c.expr);
        }
        if (sys_.find_constant(c.var) || !bound_.insert(c.var).second) {
          error(DiagnosticKind::DuplicateName, c.span,
                "letvar '" + c.var + "' in " + f_.qualified() + " is already bound");
        }
        scope_.push_back(c.var);
        cmd(*c.first);
        scope_.pop_back();
        return;
      case Cmd::Kind::Call: {
        for (const auto& a : c.args) expr(*a);
        target(c.var, c.span);
        std::string callee = sys_.resolve_callee(f_.app, c);
        const FunDecl* g = sys_.find_function(callee);
        if (!g) {
          error(DiagnosticKind::UnknownReference, c.span, "unknown function '" + callee + "'");
          return;
        }
        if (g->params.size() != c.args.size()) {
          error(DiagnosticKind::ArityMismatch, c.span,
                callee + " expects " + std::to_string(g->params.size()) + " arguments, got " +
                    std::to_string(c.args.size()));
        }
        if (std::find(callees.begin(), callees.end(), callee) == callees.end()) {
          callees.push_back(callee);
        }
        return;
      }
      case Cmd::Kind::Test:
        if (std::find(tests_.begin(), tests_.end(), c.perm) != tests_.end()) {
          error(DiagnosticKind::RepeatedPermissionTest, c.span,
                "permission '" + c.perm + "' is already tested by an enclosing test");
        }
        tests_.push_back(c.perm);
        cmd(*c.first);
        cmd(*c.second);
        tests_.pop_back();
        return;
    }
  }

  const System& sys_;
  const FunDecl& f_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> bound_;
  std::vector<std::string> scope_;
  std::vector<std::string> tests_;
};

}  // namespace

int rank_of(const Cmd& c, const System& sys, const std::string& app,
            const std::map<std::string, int>& fun_rank) {
  switch (c.kind) {
    case Cmd::Kind::Assign: return 0;
    case Cmd::Kind::While:
    case Cmd::Kind::LetVar: return rank_of(*c.first, sys, app, fun_rank);
    case Cmd::Kind::If:
    case Cmd::Kind::Seq:
    case Cmd::Kind::Test:
      return std::max(rank_of(*c.first, sys, app, fun_rank),
                      rank_of(*c.second, sys, app, fun_rank));
    case Cmd::Kind::Call: return fun_rank.at(sys.resolve_callee(app, c)) + 1;
  }
  return 0;
}

CheckedSystem validate_system(const System& sys) {
  std::vector<Diagnostic> diags;
  CheckedSystem out;
  for (const auto& f : sys.functions) {
    FunctionChecker checker(sys, f, diags);
    checker.run();
    out.callees[f.qualified()] = checker.callees;
  }
  for (const auto& c : sys.constants) {
    if (c.type.perm_count() != sys.perm_count()) {
      diags.push_back({DiagnosticKind::BadTypeLiteral, c.span, "constant type universe mismatch"});
    }
  }
  if (!diags.empty()) throw InputError(std::move(diags));

  // Depth-first topological sort; a grey node reached again closes a cycle.
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    mark[name] = Mark::Grey;
    stack.push_back(name);
    for (const auto& callee : out.callees[name]) {
      if (mark[callee] == Mark::Grey) {
        auto start = std::find(stack.begin(), stack.end(), callee);
        std::string cycle;
        for (auto it = start; it != stack.end(); ++it) cycle += *it + " -> ";
        cycle += callee;
        throw InputError(DiagnosticKind::RecursiveCall, sys.find_function(name)->span,
                         "recursive call cycle: " + cycle);
      }
      if (mark[callee] == Mark::White) visit(callee);
    }
    stack.pop_back();
    mark[name] = Mark::Black;
    out.topo_order.push_back(name);
  };
  for (const auto& f : sys.functions) mark[f.qualified()] = Mark::White;
  for (const auto& f : sys.functions) {
    if (mark[f.qualified()] == Mark::White) visit(f.qualified());
  }
  for (const auto& name : out.topo_order) {
    const FunDecl* f = sys.find_function(name);
    out.rank[name] = rank_of(*f->body, sys, f->app, out.rank);
  }
  return out;
}

}  // namespace permflow
