#pragma once

#include <optional>
#include <string>
#include <vector>

#include "permflow/constraints.hpp"
#include "permflow/solver.hpp"
#include "permflow/typecheck.hpp"

namespace permflow {

struct FunctionInference {
  std::string function;
  bool annotated = false;
  /// Set when the system is satisfiable.
  std::optional<FunctionType> type;
  /// Type variables of the signature (empty for annotated functions).
  std::vector<VarId> vars;
  std::size_t constraint_count = 0;
};

struct InferReport {
  Generated generated;
  SolveResult solution;
  /// Callees first.
  std::vector<FunctionInference> functions;
  FunctionTable table;
  LetVarTypes letvars;
  /// Functions owning a constraint of the minimized failing core.
  std::vector<std::string> blamed;

  bool ok() const { return solution.sat; }
};

/// Generates constraints for the whole system and solves them jointly.
/// Annotated signatures are kept as given; on success every function is
/// re-checked with the trace rules against the inferred table.
InferReport infer_system(const System& sys);

/// Least letvar types making `f`'s body check against `ft`, or nothing when
/// no choice works.
std::optional<LetVarTypes> infer_letvar_types(const System& sys, const FunDecl& f,
                                              const FunctionTable& ft);

/// Copy of `sys` with every parameter, result and letvar annotated from a
/// successful inference.
System annotate_system(const System& sys, const InferReport& report);

}  // namespace permflow
