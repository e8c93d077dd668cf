#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef PERMFLOW_CORPUS_DIR
#define PERMFLOW_CORPUS_DIR "corpus"
#endif

namespace permflow::testing {

std::uint64_t test_seed() {
  if (const char* s = std::getenv("PERMFLOW_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240611;
}

const std::vector<NamedLattice>& lattice_catalog() {
  static const std::vector<NamedLattice> catalog = [] {
    std::vector<NamedLattice> out;
    out.push_back({"chain2", Lattice::chain({"L", "H"})});
    out.push_back({"chain3", Lattice::chain({"L", "M", "H"})});
    out.push_back({"chain4", Lattice::chain({"a", "b", "c", "d"})});
    out.push_back({"chain5", Lattice::chain({"a", "b", "c", "d", "e"})});
    out.push_back({"diamond", Lattice::load({{"L", "l1", "l2", "H"},
                                             {{"L", "l1"}, {"L", "l2"}, {"l1", "H"}, {"l2", "H"}}})});
    out.push_back({"m3", Lattice::load({{"0", "a", "b", "c", "1"},
                                        {{"0", "a"}, {"0", "b"}, {"0", "c"},
                                         {"a", "1"}, {"b", "1"}, {"c", "1"}}})});
    out.push_back({"n5", Lattice::load({{"0", "a", "b", "c", "1"},
                                        {{"0", "a"}, {"a", "b"}, {"b", "1"},
                                         {"0", "c"}, {"c", "1"}}})});
    return out;
  }();
  return catalog;
}

PermissionUniverse universe_of(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  return PermissionUniverse(names);
}

Level random_level(std::mt19937_64& rng, const Lattice& lat) {
  return static_cast<Level>(std::uniform_int_distribution<std::size_t>(0, lat.size() - 1)(rng));
}

BaseType random_type(std::mt19937_64& rng, const Lattice& lat, std::size_t perm_count) {
  std::vector<Level> table(std::size_t{1} << perm_count);
  for (auto& l : table) l = random_level(rng, lat);
  return BaseType::from_table(std::move(table));
}

PermissionTrace random_trace(std::mt19937_64& rng, std::size_t perm_count) {
  PermSet pos = 0, neg = 0;
  std::uniform_int_distribution<int> pick(0, 2);
  for (std::size_t p = 0; p < perm_count; ++p) {
    int v = pick(rng);
    if (v == 1) pos |= perm_bit(static_cast<Perm>(p));
    if (v == 2) neg |= perm_bit(static_cast<Perm>(p));
  }
  return PermissionTrace(pos, neg);
}

BaseType apply_sequence(const BaseType& t, const Literals& lits) {
  BaseType out = t;
  for (const auto& [p, s] : lits) out = s == Sign::Plus ? promote(out, p) : demote(out, p);
  return out;
}

Literals random_literals(std::mt19937_64& rng, std::size_t perm_count, std::size_t max_len) {
  Literals out;
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  for (std::size_t i = 0; i < len; ++i) {
    auto p = static_cast<Perm>(std::uniform_int_distribution<std::size_t>(0, perm_count - 1)(rng));
    out.emplace_back(p, rng() % 2 ? Sign::Plus : Sign::Minus);
  }
  return out;
}

namespace {

struct TermMaker {
  std::mt19937_64& rng;
  const Lattice& lat;
  std::size_t n;
  std::size_t vars;

  bool coin(int percent) { return static_cast<int>(rng() % 100) < percent; }

  PermSet random_set() {
    return static_cast<PermSet>(rng() % (std::size_t{1} << n));
  }

  // Ground types on the right lean towards the top so that a fair share of
  // instances are satisfiable.
  BaseType ground(bool high) {
    std::vector<Level> table(std::size_t{1} << n);
    for (auto& l : table) {
      Level a = random_level(rng, lat);
      Level b = random_level(rng, lat);
      l = high ? lat.join(a, b) : lat.meet(a, b);
    }
    return BaseType::from_table(std::move(table));
  }

  Term atom(bool right) {
    if (coin(65)) return var_term(static_cast<VarId>(rng() % vars));
    return ground_term(ground(right));
  }

  Term left(int depth) {
    if (depth > 0) {
      int r = static_cast<int>(rng() % 100);
      if (r < 25) return join_term(left(depth - 1), left(depth - 1));
      if (r < 35) return project_term(left(depth - 1), random_set());
    }
    return atom(false);
  }

  Term right(int depth) {
    if (depth > 0 && n > 0) {
      int r = static_cast<int>(rng() % 100);
      if (r < 15) return meet_term(right(depth - 1), right(depth - 1));
      if (r < 40) {
        auto p = static_cast<Perm>(rng() % n);
        return merge_term(p, right(depth - 1), right(depth - 1));
      }
      if (r < 50) return project_term(right(depth - 1), random_set());
    }
    return atom(true);
  }
};

}  // namespace

ConstraintSystem random_constraints(std::mt19937_64& rng, const Lattice& lat,
                                    std::size_t perm_count, RandomSystemShape shape) {
  ConstraintSystem cs;
  cs.perm_count = perm_count;
  for (std::size_t i = 0; i < shape.vars; ++i) cs.fresh("rand", "v" + std::to_string(i), VarRole::Param);
  TermMaker make{rng, lat, perm_count, shape.vars};
  std::size_t count = std::uniform_int_distribution<std::size_t>(1, shape.constraints)(rng);
  for (std::size_t i = 0; i < count; ++i) {
    Constraint c;
    c.guard = random_trace(rng, perm_count);
    c.lhs = make.left(2);
    c.rhs = make.right(2);
    c.function = "rand";
    cs.constraints.push_back(std::move(c));
  }
  return cs;
}

std::string corpus_dir() { return PERMFLOW_CORPUS_DIR; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> list_systems(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pf") {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

DerivationSearch::DerivationSearch(const System& sys, const FunctionTable& ft)
    : sys_(sys), ft_(ft) {
  const std::size_t n = sys.perm_count();
  const std::size_t sets = std::size_t{1} << n;
  const std::size_t levels = sys.lattice.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < sets; ++i) total *= levels;
  if (total > 4096) throw std::invalid_argument("type space too large for exhaustive search");
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Level> table(sets);
    std::size_t c = code;
    for (auto& l : table) {
      l = static_cast<Level>(c % levels);
      c /= levels;
    }
    all_.push_back(BaseType::from_table(std::move(table)));
  }
}

std::size_t DerivationSearch::index(const BaseType& t) const {
  auto it = std::find(all_.begin(), all_.end(), t);
  if (it == all_.end()) throw std::logic_error("type outside the enumerated space");
  return static_cast<std::size_t>(it - all_.begin());
}

DerivationSearch::Mask DerivationSearch::single(const BaseType& t) const {
  Mask m(all_.size(), false);
  m[index(t)] = true;
  return m;
}

// T-SUBe: anything above a derivable expression type.
DerivationSearch::Mask DerivationSearch::up(Mask m) const {
  Mask out(all_.size(), false);
  for (std::size_t i = 0; i < all_.size(); ++i) {
    if (!m[i]) continue;
    for (std::size_t j = 0; j < all_.size(); ++j) {
      if (bt_leq(sys_.lattice, all_[i], all_[j])) out[j] = true;
    }
  }
  return out;
}

// T-SUBc: anything below a derivable command type.
DerivationSearch::Mask DerivationSearch::down(Mask m) const {
  Mask out(all_.size(), false);
  for (std::size_t i = 0; i < all_.size(); ++i) {
    if (!m[i]) continue;
    for (std::size_t j = 0; j < all_.size(); ++j) {
      if (bt_leq(sys_.lattice, all_[j], all_[i])) out[j] = true;
    }
  }
  return out;
}

namespace {

std::vector<bool> both(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::vector<bool> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

}  // namespace

DerivationSearch::Mask DerivationSearch::expr(const Env& env, const Expr& e) const {
  const std::size_t n = sys_.perm_count();
  switch (e.kind) {
    case Expr::Kind::IntLit: return up(single(embed(sys_.lattice.bottom(), n)));
    case Expr::Kind::Var: {
      auto it = env.find(e.name);
      if (it != env.end()) return up(single(it->second));
      return up(single(sys_.find_constant(e.name)->type));
    }
    case Expr::Kind::BinOp: return both(expr(env, *e.lhs), expr(env, *e.rhs));
  }
  return Mask(all_.size(), false);
}

DerivationSearch::Mask DerivationSearch::cmd(const Env& env, const std::string& app,
                                             const Cmd& c) const {
  Mask none(all_.size(), false);
  switch (c.kind) {
    case Cmd::Kind::Assign: {
      const BaseType& target = env.at(c.var);
      if (!expr(env, *c.expr)[index(target)]) return none;
      return down(single(target));
    }
    case Cmd::Kind::LetVar: {
      Mask init = expr(env, *c.expr);
      Mask out = none;
      for (std::size_t s = 0; s < all_.size(); ++s) {
        if (!init[s]) continue;
        Env inner = env;
        inner[c.var] = all_[s];
        Mask body = cmd(inner, app, *c.first);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] || body[i];
      }
      return out;
    }
    case Cmd::Kind::If:
      return both(expr(env, *c.expr),
                  both(cmd(env, app, *c.first), cmd(env, app, *c.second)));
    case Cmd::Kind::While: return both(expr(env, *c.expr), cmd(env, app, *c.first));
    case Cmd::Kind::Seq: return both(cmd(env, app, *c.first), cmd(env, app, *c.second));
    case Cmd::Kind::Call: {
      const FunctionType& ft = ft_.at(sys_.resolve_callee(app, c));
      PermSet theta = sys_.theta(app);
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (!expr(env, *c.args[i])[index(project(ft.params[i], theta))]) return none;
      }
      const BaseType& target = env.at(c.var);
      if (!bt_leq(sys_.lattice, project(ft.ret, theta), target)) return none;
      return down(single(target));
    }
    case Cmd::Kind::Test: {
      Perm p = sys_.universe.perm(c.perm);
      Env promoted, demoted;
      for (const auto& [x, t] : env) {
        promoted[x] = promote(t, p);
        demoted[x] = demote(t, p);
      }
      Mask a = cmd(promoted, app, *c.first);
      Mask b = cmd(demoted, app, *c.second);
      Mask out = none;
      for (std::size_t i = 0; i < all_.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < all_.size(); ++j) {
          if (b[j]) out[index(merge(p, all_[i], all_[j]))] = true;
        }
      }
      return down(out);
    }
  }
  return none;
}

bool DerivationSearch::function_typable(const FunDecl& f, const FunctionType& type) const {
  Env env;
  for (std::size_t i = 0; i < f.params.size(); ++i) env[f.params[i].name] = type.params[i];
  env[kReturnVar] = type.ret;
  Mask m = cmd(env, f.app, *f.body);
  return std::any_of(m.begin(), m.end(), [](bool b) { return b; });
}

}  // namespace permflow::testing
