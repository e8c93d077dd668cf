#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "permflow/diagnostics.hpp"
#include "permflow/lattice.hpp"
#include "permflow/perm_types.hpp"

namespace permflow {

enum class BinOp { Add, Sub, Mul, Eq, Lt };

const char* to_string(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, Var, BinOp };

  Kind kind = Kind::IntLit;
  std::int64_t value = 0;
  std::string name;
  BinOp op = BinOp::Add;
  ExprPtr lhs;
  ExprPtr rhs;
  SourceSpan span;

  static ExprPtr lit(std::int64_t v, SourceSpan span = {});
  static ExprPtr var(std::string name, SourceSpan span = {});
  static ExprPtr bin(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
};

struct Cmd;
using CmdPtr = std::shared_ptr<const Cmd>;

struct Cmd {
  enum class Kind { Assign, If, While, Seq, LetVar, Call, Test };

  Kind kind = Kind::Assign;
  // Assignment target, letvar name, or call result variable.
  std::string var;
  // Assigned value, condition, or letvar initializer.
  ExprPtr expr;
  // Branches (If/Test), loop body (While), parts (Seq), letvar body (first).
  CmdPtr first;
  CmdPtr second;
  // Call target; an empty app means the caller's own app.
  std::string callee_app;
  std::string callee_fun;
  std::vector<ExprPtr> args;
  // Tested permission.
  std::string perm;
  // Optional letvar annotation.
  std::optional<BaseType> var_type;
  SourceSpan span;

  static CmdPtr assign(std::string x, ExprPtr e, SourceSpan span = {});
  static CmdPtr if_(ExprPtr cond, CmdPtr then_c, CmdPtr else_c, SourceSpan span = {});
  static CmdPtr while_(ExprPtr cond, CmdPtr body, SourceSpan span = {});
  static CmdPtr seq(CmdPtr a, CmdPtr b, SourceSpan span = {});
  static CmdPtr letvar(std::string x, ExprPtr init, CmdPtr body, SourceSpan span = {},
                       std::optional<BaseType> type = std::nullopt);
  static CmdPtr call(std::string x, std::string app, std::string fun, std::vector<ExprPtr> args,
                     SourceSpan span = {});
  static CmdPtr test(std::string perm, CmdPtr yes, CmdPtr no, SourceSpan span = {});
};

inline constexpr const char* kReturnVar = "r";

struct Param {
  std::string name;
  std::optional<BaseType> type;
  SourceSpan span;
};

struct FunDecl {
  std::string app;
  std::string name;
  std::vector<Param> params;
  std::optional<BaseType> ret_type;
  bool infer_marker = false;
  CmdPtr body;
  SourceSpan span;

  std::string qualified() const { return app + "." + name; }
  bool annotated() const { return ret_type.has_value(); }
  std::optional<FunctionType> annotation() const;
};

struct Constant {
  std::string name;
  std::int64_t value = 0;
  BaseType type;
  std::string app;
  SourceSpan span;
};

struct AppDecl {
  std::string name;
  PermSet perms = 0;
  SourceSpan span;
};

struct System {
  Lattice lattice = Lattice::chain({"L", "H"});
  PermissionUniverse universe;
  std::vector<AppDecl> apps;
  std::vector<Constant> constants;
  std::vector<FunDecl> functions;

  std::size_t perm_count() const { return universe.size(); }
  const AppDecl* find_app(const std::string& name) const;
  PermSet theta(const std::string& app) const;
  const Constant* find_constant(const std::string& name) const;
  const FunDecl* find_function(const std::string& qualified) const;
  FunDecl* find_function(const std::string& qualified);
  /// Resolves a call target written inside `caller_app`.
  std::string resolve_callee(const std::string& caller_app, const Cmd& call) const;
};

}  // namespace permflow
