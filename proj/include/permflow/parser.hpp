#pragma once

#include <string_view>

#include "permflow/ast.hpp"

namespace permflow {

/// Parses a system file. Resolves level, permission, app, constant and
/// function names; throws InputError on the first problem found.
System parse_system(std::string_view text);

/// Parses a base-type literal such as `{ {p}: H, _: L }` or a bare level.
BaseType parse_base_type(std::string_view text, const Lattice& lat,
                         const PermissionUniverse& universe);

}  // namespace permflow
