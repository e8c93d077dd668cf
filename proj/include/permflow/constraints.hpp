#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "permflow/ast.hpp"
#include "permflow/trace.hpp"
#include "permflow/typecheck.hpp"

namespace permflow {

using VarId = std::uint32_t;

enum class VarRole { Param, Return, LetVar, Split };

struct TypeVar {
  VarId id = 0;
  std::string function;
  std::string name;
  VarRole role = VarRole::Param;
  SourceSpan span;
};

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  enum class Kind { Var, Ground, Join, Meet, Merge, Project };

  Kind kind = Kind::Ground;
  VarId var = 0;
  BaseType ground;
  Perm perm = 0;
  PermSet set = 0;
  Term a;
  Term b;
};

Term var_term(VarId id);
Term ground_term(BaseType t);
Term join_term(Term a, Term b);
Term meet_term(Term a, Term b);
Term merge_term(Perm p, Term a, Term b);
Term project_term(Term t, PermSet set);

bool same_term(const Term& a, const Term& b);
bool term_is_atomic(const Term& t);
void collect_vars(const Term& t, std::vector<VarId>& out);

using Substitution = std::map<VarId, BaseType>;

/// Evaluates a term; variables missing from θ read as the bottom type.
BaseType eval_term(const Term& t, const Lattice& lat, std::size_t perm_count,
                   const Substitution& theta);

std::string format_term(const Term& t, const Lattice& lat, const PermissionUniverse& universe,
                        const std::vector<TypeVar>* vars = nullptr);

/// (Λ, lhs ≤ rhs)
struct Constraint {
  PermissionTrace guard;
  Term lhs;
  Term rhs;
  std::string function;
  SourceSpan span;
};

/// (Λl, lhs ≤ Λr, rhs)
struct GenConstraint {
  PermissionTrace lguard;
  Term lhs;
  PermissionTrace rguard;
  Term rhs;
};

struct ConstraintSystem {
  std::size_t perm_count = 0;
  std::vector<TypeVar> vars;
  std::vector<Constraint> constraints;

  VarId fresh(std::string function, std::string name, VarRole role, SourceSpan span = {});
};

bool satisfies(const Lattice& lat, std::size_t perm_count, const Substitution& theta,
               const Constraint& c);
bool satisfies(const Lattice& lat, std::size_t perm_count, const Substitution& theta,
               const GenConstraint& c);

std::string format_constraint(const Constraint& c, const Lattice& lat,
                              const PermissionUniverse& universe,
                              const std::vector<TypeVar>* vars = nullptr);
std::string format_constraint(const GenConstraint& c, const Lattice& lat,
                              const PermissionUniverse& universe,
                              const std::vector<TypeVar>* vars = nullptr);

/// Signature of a function in terms of type terms.
struct FunctionTerms {
  std::vector<Term> params;
  Term ret;
};

struct Generated {
  ConstraintSystem system;
  std::map<std::string, FunctionTerms> functions;
  /// Variable standing for each unannotated letvar.
  std::map<const Cmd*, VarId> letvars;
};

struct GenOptions {
  /// Functions whose bodies contribute constraints; empty means all.
  std::vector<std::string> bodies;
  /// Use these signatures instead of annotations or fresh variables.
  const FunctionTable* fixed = nullptr;
};

/// Constraint generation over a validated system. Unannotated functions get
/// fresh variables for their parameters and result; annotated ones (and
/// those in `options.fixed`) use ground types. Every unannotated letvar gets
/// a fresh variable.
Generated gen_constraints(const System& sys, const GenOptions& options = {});

std::vector<GenConstraint> generalize(const std::vector<Constraint>& constraints);

bool has_unannotated_letvar(const Cmd& c);

}  // namespace permflow
