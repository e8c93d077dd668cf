#include "permflow/printer.hpp"

#include <sstream>

namespace permflow {

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Eq:
    case BinOp::Lt: return 1;
    case BinOp::Add:
    case BinOp::Sub: return 2;
    case BinOp::Mul: return 3;
  }
  return 0;
}

void expr_to(std::ostream& out, const Expr& e, int min_prec) {
  switch (e.kind) {
    case Expr::Kind::IntLit: out << e.value; return;
    case Expr::Kind::Var: out << e.name; return;
    case Expr::Kind::BinOp: {
      int prec = precedence(e.op);
      bool parens = prec < min_prec;
      if (parens) out << "(";
      expr_to(out, *e.lhs, prec);
      out << " " << to_string(e.op) << " ";
      expr_to(out, *e.rhs, prec + 1);
      if (parens) out << ")";
      return;
    }
  }
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

void cmd_to(std::ostream& out, const Cmd& c, const System& sys, int indent);

// Lines of a sequence, flattening the right spine.
void block_body(std::ostream& out, const Cmd& c, const System& sys, int indent) {
  const Cmd* cur = &c;
  while (true) {
    out << pad(indent);
    if (cur->kind == Cmd::Kind::Seq) {
      cmd_to(out, *cur->first, sys, indent);
      out << ";\n";
      cur = cur->second.get();
    } else {
      cmd_to(out, *cur, sys, indent);
      out << "\n";
      break;
    }
  }
}

void cmd_to(std::ostream& out, const Cmd& c, const System& sys, int indent) {
  switch (c.kind) {
    case Cmd::Kind::Assign:
      out << c.var << " := " << print_expr(*c.expr);
      return;
    case Cmd::Kind::Seq:
      out << "{\n";
      block_body(out, c, sys, indent + 1);
      out << pad(indent) << "}";
      return;
    case Cmd::Kind::If:
      out << "if " << print_expr(*c.expr) << " then ";
      cmd_to(out, *c.first, sys, indent);
      out << " else ";
      cmd_to(out, *c.second, sys, indent);
      return;
    case Cmd::Kind::While:
      out << "while " << print_expr(*c.expr) << " do ";
      cmd_to(out, *c.first, sys, indent);
      return;
    case Cmd::Kind::LetVar:
      out << "letvar " << c.var;
      if (c.var_type) out << " : " << format_base_type(*c.var_type, sys.lattice, sys.universe);
      out << " = " << print_expr(*c.expr) << " in ";
      cmd_to(out, *c.first, sys, indent);
      return;
    case Cmd::Kind::Call: {
      out << c.var << " := call ";
      if (!c.callee_app.empty()) out << c.callee_app << ".";
      out << c.callee_fun << "(";
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out << ", ";
        out << print_expr(*c.args[i]);
      }
      out << ")";
      return;
    }
    case Cmd::Kind::Test:
      out << "test(" << c.perm << ") ";
      cmd_to(out, *c.first, sys, indent);
      out << " else ";
      cmd_to(out, *c.second, sys, indent);
      return;
  }
}

void constant_to(std::ostream& out, const Constant& c, const System& sys, int indent) {
  out << pad(indent) << "const " << c.name << " : "
      << format_base_type(c.type, sys.lattice, sys.universe) << " = " << c.value << ";\n";
}

bool same_opt_type(const std::optional<BaseType>& a, const std::optional<BaseType>& b) {
  return a == b;
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  expr_to(out, e, 0);
  return out.str();
}

std::string print_cmd(const Cmd& c, const System& sys, int indent) {
  std::ostringstream out;
  cmd_to(out, c, sys, indent);
  return out.str();
}

std::string print_system(const System& sys) {
  std::ostringstream out;
  const Lattice& lat = sys.lattice;
  out << "lattice { levels ";
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (i) out << ", ";
    out << lat.name(static_cast<Level>(i));
  }
  out << ";";
  auto covers = lat.covers();
  if (!covers.empty()) {
    out << " order ";
    for (std::size_t i = 0; i < covers.size(); ++i) {
      if (i) out << ", ";
      out << lat.name(covers[i].first) << " < " << lat.name(covers[i].second);
    }
    out << ";";
  }
  out << " }\n";
  out << "permissions { ";
  for (std::size_t i = 0; i < sys.universe.size(); ++i) {
    if (i) out << ", ";
    out << sys.universe.name(static_cast<Perm>(i));
  }
  out << (sys.universe.size() ? " }\n" : "}\n");

  for (const auto& c : sys.constants) {
    if (c.app.empty()) {
      out << "\n";
      constant_to(out, c, sys, 0);
    }
  }
  for (const auto& app : sys.apps) {
    out << "\napp " << app.name << " perms " << sys.universe.format(app.perms) << " {\n";
    bool first = true;
    for (const auto& c : sys.constants) {
      if (c.app != app.name) continue;
      constant_to(out, c, sys, 1);
      first = false;
    }
    for (const auto& f : sys.functions) {
      if (f.app != app.name) continue;
      if (!first) out << "\n";
      first = false;
      out << pad(1) << "fun " << f.name << "(";
      for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (i) out << ", ";
        out << f.params[i].name;
        if (f.params[i].type) {
          out << " : " << format_base_type(*f.params[i].type, sys.lattice, sys.universe);
        }
      }
      out << ")";
      if (f.ret_type) {
        out << " : " << format_base_type(*f.ret_type, sys.lattice, sys.universe);
      } else if (f.infer_marker) {
        out << " infer";
      }
      out << " {\n" << pad(2) << "init r = 0 in {\n";
      std::ostringstream body;
      block_body(body, *f.body, sys, 3);
      std::string text = body.str();
      text.pop_back();
      out << text << ";\n" << pad(3) << "return r\n" << pad(2) << "}\n" << pad(1) << "}\n";
    }
    out << "}\n";
  }
  return out.str();
}

bool same_expr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit: return a.value == b.value;
    case Expr::Kind::Var: return a.name == b.name;
    case Expr::Kind::BinOp:
      return a.op == b.op && same_expr(*a.lhs, *b.lhs) && same_expr(*a.rhs, *b.rhs);
  }
  return false;
}

bool same_cmd(const Cmd& a, const Cmd& b) {
  if (a.kind != b.kind || a.var != b.var || a.perm != b.perm || a.callee_app != b.callee_app ||
      a.callee_fun != b.callee_fun || !same_opt_type(a.var_type, b.var_type) ||
      a.args.size() != b.args.size()) {
    return false;
  }
  if ((a.expr == nullptr) != (b.expr == nullptr) || (a.expr && !same_expr(*a.expr, *b.expr))) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_expr(*a.args[i], *b.args[i])) return false;
  }
  if ((a.first == nullptr) != (b.first == nullptr) || (a.first && !same_cmd(*a.first, *b.first))) {
    return false;
  }
  if ((a.second == nullptr) != (b.second == nullptr) ||
      (a.second && !same_cmd(*a.second, *b.second))) {
    return false;
  }
  return true;
}

bool same_system(const System& a, const System& b) {
  if (!(a.lattice == b.lattice) || !(a.universe == b.universe) || a.apps.size() != b.apps.size() ||
      a.constants.size() != b.constants.size() || a.functions.size() != b.functions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.apps.size(); ++i) {
    if (a.apps[i].name != b.apps[i].name || a.apps[i].perms != b.apps[i].perms) return false;
  }
  // Top-level constants print ahead of app-local ones, so compare by name.
  for (const auto& x : a.constants) {
    const Constant* found = b.find_constant(x.name);
    if (!found) return false;
    const auto& y = *found;
    if (x.name != y.name || x.value != y.value || x.type != y.type || x.app != y.app) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& f = a.functions[i];
    const auto& g = b.functions[i];
    if (f.app != g.app || f.name != g.name || f.ret_type != g.ret_type ||
        f.infer_marker != g.infer_marker || f.params.size() != g.params.size()) {
      return false;
    }
    for (std::size_t k = 0; k < f.params.size(); ++k) {
      if (f.params[k].name != g.params[k].name || f.params[k].type != g.params[k].type) {
        return false;
      }
    }
    if (!same_cmd(*f.body, *g.body)) return false;
  }
  return true;
}

}  // namespace permflow
