#include "permflow/oracle.hpp"

#include <stdexcept>

namespace permflow {

namespace {

class Pointwise {
 public:
  Pointwise(const Lattice& lat, std::size_t perm_count, std::size_t var_count)
      : lat_(lat), sets_(std::size_t{1} << perm_count),
        val_(var_count, std::vector<Level>(sets_, lat.bottom())) {}

  Level eval(const Term& t, PermSet at) const {
    switch (t->kind) {
      case TermNode::Kind::Var: return val_[t->var][at];
      case TermNode::Kind::Ground: return t->ground.at(at);
      case TermNode::Kind::Join: return lat_.join(eval(t->a, at), eval(t->b, at));
      case TermNode::Kind::Meet: return lat_.meet(eval(t->a, at), eval(t->b, at));
      case TermNode::Kind::Merge: return contains(at, t->perm) ? eval(t->a, at) : eval(t->b, at);
      case TermNode::Kind::Project: return eval(t->a, t->set);
    }
    return lat_.bottom();
  }

  // Makes `level` ≤ t(at) by raising variables only; ground parts are left
  // for the final check.
  bool raise(const Term& t, PermSet at, Level level) {
    switch (t->kind) {
      case TermNode::Kind::Var: {
        Level& cur = val_[t->var][at];
        Level next = lat_.join(cur, level);
        if (next == cur) return false;
        cur = next;
        return true;
      }
      case TermNode::Kind::Ground: return false;
      case TermNode::Kind::Meet: {
        bool a = raise(t->a, at, level);
        bool b = raise(t->b, at, level);
        return a || b;
      }
      case TermNode::Kind::Merge:
        return raise(contains(at, t->perm) ? t->a : t->b, at, level);
      case TermNode::Kind::Project: return raise(t->a, t->set, level);
      case TermNode::Kind::Join:
        throw std::logic_error("join on the right of a constraint");
    }
    return false;
  }

  Substitution theta() const {
    Substitution out;
    for (std::size_t v = 0; v < val_.size(); ++v) {
      out[static_cast<VarId>(v)] = BaseType::from_table(val_[v]);
    }
    return out;
  }

  std::size_t sets() const { return sets_; }

 private:
  const Lattice& lat_;
  std::size_t sets_;
  std::vector<std::vector<Level>> val_;
};

}  // namespace

OracleResult oracle_solve(const ConstraintSystem& cs, const Lattice& lat) {
  if (cs.perm_count > kOracleMaxPermissions) {
    throw InputError(DiagnosticKind::UniverseTooLarge, {},
                     "oracle supports at most " + std::to_string(kOracleMaxPermissions) +
                         " permissions");
  }
  OracleResult result;
  Pointwise pw(lat, cs.perm_count, cs.vars.size());
  bool changed = true;
  while (changed) {
    changed = false;
    ++result.rounds;
    for (const auto& c : cs.constraints) {
      for (std::size_t s = 0; s < pw.sets(); ++s) {
        auto set = static_cast<PermSet>(s);
        if (!c.guard.entails_by(set)) continue;
        if (pw.raise(c.rhs, set, pw.eval(c.lhs, set))) changed = true;
      }
    }
  }
  for (std::size_t i = 0; i < cs.constraints.size() && !result.violated; ++i) {
    const auto& c = cs.constraints[i];
    for (std::size_t s = 0; s < pw.sets(); ++s) {
      auto set = static_cast<PermSet>(s);
      if (c.guard.entails_by(set) && !lat.leq(pw.eval(c.lhs, set), pw.eval(c.rhs, set))) {
        result.violated = i;
        result.witness = set;
        break;
      }
    }
  }
  result.theta = pw.theta();
  result.sat = !result.violated;
  return result;
}

}  // namespace permflow
