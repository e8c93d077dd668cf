#pragma once

#include <map>
#include <string>
#include <vector>

#include "permflow/ast.hpp"

namespace permflow {

struct CheckedSystem {
  /// Qualified function names, every callee before its callers.
  std::vector<std::string> topo_order;
  std::map<std::string, int> rank;
  std::map<std::string, std::vector<std::string>> callees;
};

/// Checks closedness, scoping, call arity, acyclicity of the call graph and
/// that no permission is tested twice on one path. Throws InputError with
/// every diagnostic found.
CheckedSystem validate_system(const System& sys);

int rank_of(const Cmd& c, const System& sys, const std::string& app,
            const std::map<std::string, int>& fun_rank);

}  // namespace permflow
