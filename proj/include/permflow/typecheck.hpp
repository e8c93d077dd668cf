#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permflow/ast.hpp"
#include "permflow/trace.hpp"

namespace permflow {

using TypingEnv = std::map<std::string, BaseType>;
using FunctionTable = std::map<std::string, FunctionType>;
/// Types chosen for unannotated letvars, keyed by the letvar command.
using LetVarTypes = std::map<const Cmd*, BaseType>;

enum class TypeErrorKind { SubtypeViolation, CallArgViolation, ReturnViolation, AnnotationMismatch };

const char* to_string(TypeErrorKind kind);

struct TypeError {
  TypeErrorKind kind = TypeErrorKind::SubtypeViolation;
  std::string function;
  SourceSpan span;
  std::string message;
  BaseType lhs;
  BaseType rhs;
  PermissionTrace trace;
  /// A permission set entailing `trace` at which lhs is not below rhs.
  PermSet witness = 0;

  std::string to_string(const System& sys) const;
};

/// Syntax-directed checking with permission traces.
class TraceChecker {
 public:
  TraceChecker(const System& sys, const FunctionTable& ft, const LetVarTypes* letvars = nullptr)
      : sys_(sys), ft_(ft), letvars_(letvars) {}

  BaseType type_expr(const TypingEnv& env, const PermissionTrace& trace, const Expr& e) const;
  /// Returns the command's type, or the first violated side condition.
  BaseType check_cmd(TypingEnv& env, const PermissionTrace& trace, const std::string& app,
                     const Cmd& c) const;
  std::optional<TypeError> check_function(const FunDecl& f, const FunctionType& type) const;

 private:
  void require(TypeErrorKind kind, const Cmd& at, const BaseType& lhs, const BaseType& rhs,
               const PermissionTrace& trace, const std::string& what) const;

  const System& sys_;
  const FunctionTable& ft_;
  const LetVarTypes* letvars_;
  mutable const FunDecl* current_ = nullptr;
};

struct FunctionVerdict {
  std::string function;
  std::optional<FunctionType> type;
  std::optional<TypeError> error;
};

struct CheckReport {
  std::vector<FunctionVerdict> functions;

  bool ok() const;
};

/// Annotations of all functions; throws InputError(MissingAnnotation) when
/// some function is unannotated.
FunctionTable annotated_table(const System& sys);

/// Checks every function against its annotation, callees first. Letvars
/// without annotation get the least type that lets the body check, when one
/// exists.
CheckReport check_system(const System& sys);
std::optional<TypeError> check_function(const System& sys, const FunctionTable& ft,
                                        const std::string& name);

}  // namespace permflow
