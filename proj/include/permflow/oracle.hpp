#pragma once

#include <optional>

#include "permflow/constraints.hpp"

namespace permflow {

inline constexpr std::size_t kOracleMaxPermissions = 4;

struct OracleResult {
  bool sat = false;
  /// Least solution when sat; the final iterate otherwise.
  Substitution theta;
  /// First constraint still violated after the iteration converged.
  std::optional<std::size_t> violated;
  PermSet witness = 0;
  std::size_t rounds = 0;
};

/// Pointwise least fixpoint: every (variable, permission set) pair is an
/// unknown lattice element raised until all constraints with a non-ground
/// right-hand side hold. Throws InputError(UniverseTooLarge) above four
/// permissions.
OracleResult oracle_solve(const ConstraintSystem& cs, const Lattice& lat);

}  // namespace permflow
