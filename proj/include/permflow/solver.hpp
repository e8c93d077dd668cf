#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permflow/constraints.hpp"

namespace permflow {

struct Unsat {
  enum class Stage { Decompose, Saturate, Merge, Unify };

  Stage stage = Stage::Decompose;
  std::string reason;
  /// The refuted ground constraint, when there is one.
  std::optional<GenConstraint> refuted;
  std::optional<VarId> var;
  PermSet witness = 0;
  /// Indices into the original constraint list forming a minimized failing
  /// subset (filled by solve).
  std::vector<std::size_t> core;
};

const char* to_string(Unsat::Stage stage);

struct DecomposeResult {
  std::vector<GenConstraint> constraints;
  std::optional<Unsat> unsat;
};

/// Rewrites constraints until both sides are variables or ground types.
/// Ground sides come out with the guard already applied (guard ε).
DecomposeResult decompose(const std::vector<GenConstraint>& constraints, const Lattice& lat,
                          std::size_t perm_count);

/// A variable that was split into one fresh variable per guard cell.
struct VarSplit {
  VarId parent;
  std::vector<std::pair<PermissionTrace, VarId>> cells;
};

struct SaturateResult {
  std::vector<GenConstraint> constraints;
  std::size_t var_count = 0;
  std::vector<VarSplit> splits;
  std::optional<Unsat> unsat;
};

/// Closes simple constraints under transitivity through each variable,
/// splitting any variable that bounds itself under different guards.
SaturateResult saturate(const std::vector<GenConstraint>& simple, std::size_t var_count,
                        const Lattice& lat, std::size_t perm_count);

/// atom·trace
struct BoundTerm {
  Term atom;
  PermissionTrace trace;
};

struct Interval {
  VarId var = 0;
  PermissionTrace guard;
  std::vector<BoundTerm> lower;
  std::vector<BoundTerm> upper;
  /// Filled in once the bounds are ground (by merge_bounds or unify).
  std::optional<BaseType> lo;
  std::optional<BaseType> hi;
};

struct MergeResult {
  std::vector<Interval> intervals;
  std::optional<Unsat> unsat;
};

/// Groups the bounds of every variable into intervals over a full, pairwise
/// disjoint family of guards.
MergeResult merge_bounds(const SaturateResult& saturated, const Lattice& lat,
                         std::size_t perm_count);

struct UnifyResult {
  Substitution theta;
  std::vector<Interval> intervals;
  std::optional<Unsat> unsat;
};

/// Solves the interval equations from the largest variable down, taking the
/// least type in every interval. Split variables are reassembled.
UnifyResult unify(std::vector<Interval> intervals, const SaturateResult& saturated,
                  std::size_t original_var_count, const Lattice& lat, std::size_t perm_count);

struct SolveResult {
  bool sat = false;
  Substitution theta;
  std::vector<Interval> intervals;
  std::optional<Unsat> unsat;
  std::size_t simple_count = 0;
  std::size_t saturated_count = 0;
};

struct SolveOptions {
  bool minimize_core = true;
};

/// The full pipeline. On success θ is checked against the original
/// constraints before it is returned.
SolveResult solve(const ConstraintSystem& cs, const Lattice& lat, const SolveOptions& options = {});

}  // namespace permflow
