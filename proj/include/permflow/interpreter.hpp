#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "permflow/ast.hpp"

namespace permflow {

using EvalEnv = std::map<std::string, std::int64_t>;

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

class FuelExhausted : public std::runtime_error {
 public:
  FuelExhausted() : std::runtime_error("FuelExhausted: step budget spent") {}
};

class UnboundVariable : public std::logic_error {
 public:
  explicit UnboundVariable(const std::string& name)
      : std::logic_error("UnboundVariable: '" + name + "'") {}
};

struct ExecContext {
  std::string app;
  PermSet caller_perms = 0;
  /// Remaining rule applications; shared by nested calls.
  std::uint64_t* fuel = nullptr;
};

class Interpreter {
 public:
  explicit Interpreter(const System& sys) : sys_(sys) {}

  std::int64_t eval_expr(const EvalEnv& env, const Expr& e) const;
  void exec_cmd(EvalEnv& env, const ExecContext& ctx, const Cmd& c) const;
  /// Runs `qualified` with the given caller permission set (standing in for
  /// the calling app) and returns the final value of r.
  std::int64_t call_function(const std::string& qualified, const std::vector<std::int64_t>& args,
                             PermSet caller_perms, std::uint64_t fuel = kDefaultFuel) const;
  /// Same, but starting from a complete initial environment (parameters and
  /// r), returning the final environment.
  EvalEnv run_function(const FunDecl& f, EvalEnv env, PermSet caller_perms,
                       std::uint64_t* fuel) const;

 private:
  void tick(const ExecContext& ctx) const;

  const System& sys_;
};

std::int64_t apply_binop(BinOp op, std::int64_t a, std::int64_t b);

}  // namespace permflow
