#pragma once

#include <string>

#include "permflow/ast.hpp"

namespace permflow {

std::string print_expr(const Expr& e);
std::string print_cmd(const Cmd& c, const System& sys, int indent = 0);
std::string print_system(const System& sys);

/// Structural equality ignoring source spans.
bool same_expr(const Expr& a, const Expr& b);
bool same_cmd(const Cmd& a, const Cmd& b);
bool same_system(const System& a, const System& b);

}  // namespace permflow
