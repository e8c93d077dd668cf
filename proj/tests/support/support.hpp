#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "permflow/constraints.hpp"
#include "permflow/lattice.hpp"
#include "permflow/perm_types.hpp"
#include "permflow/trace.hpp"
#include "permflow/typecheck.hpp"

namespace permflow::testing {

/// Seed for randomized tests; PERMFLOW_SEED overrides the default.
std::uint64_t test_seed();

/// Small lattices used across property tests: chains of 2 to 5 levels, the
/// diamond, M3 and N5.
struct NamedLattice {
  std::string name;
  Lattice lattice;
};
const std::vector<NamedLattice>& lattice_catalog();

PermissionUniverse universe_of(std::size_t n);

BaseType random_type(std::mt19937_64& rng, const Lattice& lat, std::size_t perm_count);
PermissionTrace random_trace(std::mt19937_64& rng, std::size_t perm_count);
Level random_level(std::mt19937_64& rng, const Lattice& lat);

/// A literal sequence applied one promotion or demotion at a time, first
/// literal outermost (t·l1·l2 = (t·l1)·l2).
using Literals = std::vector<std::pair<Perm, Sign>>;
BaseType apply_sequence(const BaseType& t, const Literals& lits);
Literals random_literals(std::mt19937_64& rng, std::size_t perm_count, std::size_t max_len);

struct RandomSystemShape {
  std::size_t vars = 4;
  std::size_t constraints = 10;
};
/// Random constraint set respecting the grammar: joins and projections on
/// the left, meets, merges and projections on the right.
ConstraintSystem random_constraints(std::mt19937_64& rng, const Lattice& lat,
                                    std::size_t perm_count, RandomSystemShape shape);

/// Directory holding the example systems.
std::string corpus_dir();
std::string read_file(const std::string& path);
/// Sorted *.pf files directly in `dir`.
std::vector<std::string> list_systems(const std::string& dir);

/// Declarative typing by exhaustive search: the set of types each judgment
/// can derive, closed under subsumption. Types are enumerated, so only
/// tiny lattices and universes are practical.
class DerivationSearch {
 public:
  DerivationSearch(const System& sys, const FunctionTable& ft);

  /// Whether [x̄:t̄, r:t'] ⊢ body : s for some s.
  bool function_typable(const FunDecl& f, const FunctionType& type) const;

  const std::vector<BaseType>& universe() const { return all_; }

 private:
  using Mask = std::vector<bool>;
  using Env = std::map<std::string, BaseType>;

  Mask expr(const Env& env, const Expr& e) const;
  Mask cmd(const Env& env, const std::string& app, const Cmd& c) const;
  Mask up(Mask m) const;
  Mask down(Mask m) const;
  Mask single(const BaseType& t) const;
  std::size_t index(const BaseType& t) const;

  const System& sys_;
  const FunctionTable& ft_;
  std::vector<BaseType> all_;
};

}  // namespace permflow::testing
