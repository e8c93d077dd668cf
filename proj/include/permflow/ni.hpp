#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permflow/interpreter.hpp"
#include "permflow/typecheck.hpp"

namespace permflow {

struct NIConfig {
  /// Observer levels to test; empty means every level of the lattice.
  std::vector<Level> observers;
  std::int64_t domain_lo = 0;
  std::int64_t domain_hi = 2;
  std::uint64_t fuel = 100'000;
  /// Caller permission sets; empty means all of them.
  std::vector<PermSet> caller_sets;
  std::uint64_t pair_cap = 1'000'000;
  /// Compare every observable variable of the final state, for every caller
  /// set, instead of only r when the result type is observable.
  bool strict = false;
};

enum class NIVerdict { Ok, Violation, Inconclusive, Skipped };

const char* to_string(NIVerdict v);

struct NIWitness {
  /// Initial environments and the values given to varied constants.
  EvalEnv first;
  EvalEnv second;
  std::map<std::string, std::int64_t> first_constants;
  std::map<std::string, std::int64_t> second_constants;
  /// Differing final values; `variable` names which one.
  std::string variable;
  std::int64_t first_out = 0;
  std::int64_t second_out = 0;
};

struct NICell {
  std::string function;
  PermSet perms = 0;
  Level observer = 0;
  bool strict = false;
  std::uint64_t pairs_tested = 0;
  NIVerdict verdict = NIVerdict::Ok;
  std::string note;
  std::optional<NIWitness> witness;
};

struct NIReport {
  std::vector<NICell> cells;

  std::size_t count(NIVerdict v) const;
  bool ok() const { return count(NIVerdict::Violation) == 0; }
};

/// η =Γ,l_O η′: variables typed below l_O everywhere agree (both undefined
/// counts as agreeing).
bool indistinguishable(const EvalEnv& a, const EvalEnv& b, const TypingEnv& gamma,
                       const Lattice& lat, Level observer);

/// Γ at caller set P, i.e. every entry projected to P.
TypingEnv project_env(const TypingEnv& gamma, PermSet perms);

/// Tests one (function, caller set, observer) cell.
NICell nitest_cell(const System& sys, const FunctionTable& ft, const std::string& function,
                   PermSet perms, Level observer, const NIConfig& cfg);
std::vector<NICell> nitest_function(const System& sys, const FunctionTable& ft,
                                    const std::string& function, const NIConfig& cfg);
NIReport nitest_system(const System& sys, const FunctionTable& ft, const NIConfig& cfg);

/// Runs `function` from an explicit initial environment, with some constants
/// replaced. Used to replay witnesses.
EvalEnv replay(const System& sys, const std::string& function, const EvalEnv& init,
               const std::map<std::string, std::int64_t>& constants, PermSet perms,
               std::uint64_t fuel);

}  // namespace permflow
