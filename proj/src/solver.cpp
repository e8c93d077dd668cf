#include "permflow/solver.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace permflow {

const char* to_string(Unsat::Stage stage) {
  switch (stage) {
    case Unsat::Stage::Decompose: return "decompose";
    case Unsat::Stage::Saturate: return "saturate";
    case Unsat::Stage::Merge: return "merge";
    case Unsat::Stage::Unify: return "unify";
  }
  return "?";
}

namespace {

PermSet full_set(std::size_t perm_count) {
  return static_cast<PermSet>((std::size_t{1} << perm_count) - 1);
}

/// Calls f(σ) for every full sign assignment σ over `mask`.
template <typename F>
void for_each_assignment(PermSet mask, F&& f) {
  PermSet sub = 0;
  while (true) {
    f(PermissionTrace(sub, static_cast<PermSet>(mask & ~sub)));
    if (sub == mask) break;
    sub = static_cast<PermSet>((sub - mask) & mask);
  }
}

/// The part of `trace` not already fixed by `base`.
PermissionTrace rest(const PermissionTrace& trace, const PermissionTrace& base) {
  return trace_diff(trace, base);
}

bool implies(const PermissionTrace& cell, const PermissionTrace& guard) {
  return (guard.pos() & ~cell.pos()) == 0 && (guard.neg() & ~cell.neg()) == 0;
}

std::optional<PermSet> first_failure(const Lattice& lat, const BaseType& lo, const BaseType& hi,
                                     const PermissionTrace& guard) {
  return leq_under_witness(lat, lo, hi, guard);
}

// ---------------------------------------------------------------------------
// Decomposition

struct Decomposer {
  const Lattice& lat;
  std::size_t perm_count;
  std::vector<GenConstraint> out;
  std::optional<Unsat> unsat;

  void run(const std::vector<GenConstraint>& input) {
    std::vector<GenConstraint> stack(input.rbegin(), input.rend());
    const PermSet full = full_set(perm_count);
    while (!stack.empty() && !unsat) {
      GenConstraint c = std::move(stack.back());
      stack.pop_back();
      using K = TermNode::Kind;
      const TermNode& l = *c.lhs;
      const TermNode& r = *c.rhs;
      if (l.kind == K::Join) {  // CD-CUP
        stack.push_back({c.lguard, l.b, c.rguard, c.rhs});
        stack.push_back({c.lguard, l.a, c.rguard, c.rhs});
      } else if (l.kind == K::Project) {  // CD-LAPP
        stack.push_back({PermissionTrace::exactly(l.set, full), l.a, c.rguard, c.rhs});
      } else if (l.kind == K::Merge) {
        split_merge(stack, c, /*on_left=*/true);
      } else if (l.kind == K::Meet) {
        throw std::logic_error("meet on the left of a constraint");
      } else if (r.kind == K::Meet) {  // CD-CAP
        stack.push_back({c.lguard, c.lhs, c.rguard, r.b});
        stack.push_back({c.lguard, c.lhs, c.rguard, r.a});
      } else if (r.kind == K::Project) {  // CD-RAPP
        stack.push_back({c.lguard, c.lhs, PermissionTrace::exactly(r.set, full), r.a});
      } else if (r.kind == K::Merge) {  // CD-MERGE
        split_merge(stack, c, /*on_left=*/false);
      } else if (r.kind == K::Join) {
        throw std::logic_error("join on the right of a constraint");
      } else {
        atomic(c);
      }
    }
  }

  void split_merge(std::vector<GenConstraint>& stack, const GenConstraint& c, bool on_left) {
    const TermNode& m = on_left ? *c.lhs : *c.rhs;
    const PermissionTrace& own = on_left ? c.lguard : c.rguard;
    auto with = [&](const Term& part, const PermissionTrace& lg, const PermissionTrace& rg) {
      if (on_left) {
        stack.push_back({lg, part, rg, c.rhs});
      } else {
        stack.push_back({lg, c.lhs, rg, part});
      }
    };
    if (contains(own.pos(), m.perm)) {
      with(m.a, c.lguard, c.rguard);
    } else if (contains(own.neg(), m.perm)) {
      with(m.b, c.lguard, c.rguard);
    } else {
      with(m.b, c.lguard.extended(m.perm, Sign::Minus), c.rguard.extended(m.perm, Sign::Minus));
      with(m.a, c.lguard.extended(m.perm, Sign::Plus), c.rguard.extended(m.perm, Sign::Plus));
    }
  }

  void atomic(GenConstraint c) {
    using K = TermNode::Kind;
    if (c.lhs->kind == K::Ground) {
      c.lhs = ground_term(trace_apply(c.lhs->ground, c.lguard));
      c.lguard = {};
    }
    if (c.rhs->kind == K::Ground) {
      c.rhs = ground_term(trace_apply(c.rhs->ground, c.rguard));
      c.rguard = {};
    }
    if (c.lhs->kind == K::Ground && c.rhs->kind == K::Ground) {  // CD-SUB0 / CD-SUB1
      if (auto w = bt_leq_witness(lat, c.lhs->ground, c.rhs->ground)) {
        Unsat u;
        u.stage = Unsat::Stage::Decompose;
        u.reason = "ground constraint fails";
        u.refuted = c;
        u.witness = *w;
        unsat = u;
      }
      return;
    }
    if (c.lhs->kind == K::Var && c.rhs->kind == K::Var && c.lhs->var == c.rhs->var &&
        c.lguard == c.rguard) {  // CD-SVAR
      return;
    }
    out.push_back(std::move(c));
  }
};

// ---------------------------------------------------------------------------
// Saturation

struct Side {
  bool is_var = false;
  std::uint32_t id = 0;  // variable id, or index into the ground table
  PermSet pos = 0;
  PermSet neg = 0;

  PermissionTrace guard() const { return PermissionTrace(pos, neg); }
  friend auto operator<=>(const Side&, const Side&) = default;
};

struct Simple {
  Side l;
  Side r;
  friend auto operator<=>(const Simple&, const Simple&) = default;
};

class Saturator {
 public:
  Saturator(const Lattice& lat, std::size_t perm_count, std::size_t var_count)
      : lat_(lat), n_(perm_count), var_count_(var_count) {}

  void load(const std::vector<GenConstraint>& simple) {
    for (const auto& c : simple) {
      items_.push_back({side(c.lhs, c.lguard), side(c.rhs, c.rguard)});
    }
  }

  SaturateResult run() {
    SaturateResult result;
    std::size_t rounds = 0;
    while (true) {
      if (++rounds > 4096) throw std::logic_error("saturation did not converge");
      std::optional<VarId> self = close();
      if (unsat_) break;
      if (!self) break;
      split(*self);
    }
    result.unsat = unsat_;
    result.var_count = var_count_;
    result.splits = splits_;
    for (const auto& s : items_) {
      result.constraints.push_back(
          {s.l.guard(), term(s.l), s.r.guard(), term(s.r)});
    }
    return result;
  }

 private:
  Side side(const Term& t, const PermissionTrace& guard) {
    Side s;
    if (t->kind == TermNode::Kind::Var) {
      s.is_var = true;
      s.id = t->var;
      s.pos = guard.pos();
      s.neg = guard.neg();
    } else {
      s.id = intern(trace_apply(t->ground, guard));
    }
    return s;
  }

  std::uint32_t intern(const BaseType& t) {
    auto [it, inserted] = ground_ids_.emplace(t.table(), static_cast<std::uint32_t>(grounds_.size()));
    if (inserted) grounds_.push_back(t);
    return it->second;
  }

  Term term(const Side& s) const {
    return s.is_var ? var_term(s.id) : ground_term(grounds_[s.id]);
  }

  // Lower bound of its owner when true, upper bound when false.
  static bool is_lower(const Simple& s) {
    if (!s.l.is_var) return true;
    if (!s.r.is_var) return false;
    return s.r.id < s.l.id;
  }
  static VarId owner(const Simple& s) { return is_lower(s) ? s.r.id : s.l.id; }

  // Adds a normalized constraint; returns its index if it is new and
  // needs processing.
  void offer(Simple s, std::vector<std::size_t>& worklist) {
    if (!s.l.is_var && !s.r.is_var) {
      if (auto w = bt_leq_witness(lat_, grounds_[s.l.id], grounds_[s.r.id])) {
        Unsat u;
        u.stage = Unsat::Stage::Saturate;
        u.reason = "transitive bound fails";
        u.refuted = GenConstraint{{}, term(s.l), {}, term(s.r)};
        u.witness = *w;
        unsat_ = u;
      }
      return;
    }
    if (s.l.is_var && s.r.is_var && s.l == s.r) return;
    if (!seen_.insert(s).second) return;
    items_.push_back(s);
    worklist.push_back(items_.size() - 1);
  }

  // Semi-naive closure. Stops early and reports a variable bounded by itself.
  std::optional<VarId> close() {
    std::vector<Simple> start;
    start.swap(items_);
    seen_.clear();
    lowers_.assign(var_count_, {});
    uppers_.assign(var_count_, {});
    std::vector<std::size_t> worklist;
    for (const auto& s : start) offer(s, worklist);
    std::size_t head = 0;
    while (head < worklist.size() && !unsat_) {
      const Simple s = items_[worklist[head++]];
      if (s.l.is_var && s.r.is_var && s.l.id == s.r.id) return s.l.id;
      VarId v = owner(s);
      bool lower = is_lower(s);
      std::vector<Simple> derived;
      if (lower) {
        lowers_[v].push_back(s);
        for (const auto& u : uppers_[v]) derive(s, u, derived);
      } else {
        uppers_[v].push_back(s);
        for (const auto& l : lowers_[v]) derive(l, s, derived);
      }
      for (auto& d : derived) {
        offer(d, worklist);
        if (unsat_) break;
      }
    }
    return std::nullopt;
  }

  // CS-LU: (Λ1, t1 ≤ Λr, α) and (Λl, α ≤ Λ2, t2) give t1 ≤ t2 on every
  // permission set entailing Λl ∧ Λr. The side not fixed by the other trace
  // ranges over all sign assignments of the variable's own guard.
  void derive(const Simple& lo, const Simple& up, std::vector<Simple>& out) {
    PermissionTrace lr = lo.r.guard();
    PermissionTrace ul = up.l.guard();
    if (!trace_and(ul, lr)) return;
    PermissionTrace lbase = lo.l.guard().extended(rest(ul, lr));
    PermissionTrace rbase = up.r.guard().extended(rest(lr, ul));
    PermSet lfree = static_cast<PermSet>(lr.mentioned() & ~lbase.mentioned());
    PermSet rfree = static_cast<PermSet>(ul.mentioned() & ~rbase.mentioned());

    std::vector<Side> lefts;
    if (lo.l.is_var) {
      for_each_assignment(lfree, [&](const PermissionTrace& s) {
        PermissionTrace g = lbase.extended(s);
        lefts.push_back({true, lo.l.id, g.pos(), g.neg()});
      });
    } else {
      BaseType acc = embed(lat_.bottom(), n_);
      for_each_assignment(lfree, [&](const PermissionTrace& s) {
        acc = bt_join(lat_, acc, trace_apply(grounds_[lo.l.id], lbase.extended(s)));
      });
      lefts.push_back({false, intern(acc), 0, 0});
    }
    std::vector<Side> rights;
    if (up.r.is_var) {
      for_each_assignment(rfree, [&](const PermissionTrace& s) {
        PermissionTrace g = rbase.extended(s);
        rights.push_back({true, up.r.id, g.pos(), g.neg()});
      });
    } else {
      BaseType acc = embed(lat_.top(), n_);
      for_each_assignment(rfree, [&](const PermissionTrace& s) {
        acc = bt_meet(lat_, acc, trace_apply(grounds_[up.r.id], rbase.extended(s)));
      });
      rights.push_back({false, intern(acc), 0, 0});
    }
    for (const auto& a : lefts) {
      for (const auto& b : rights) out.push_back({a, b});
    }
  }

  // Replaces α by one fresh variable per full sign assignment over the
  // permissions its guards mention.
  void split(VarId alpha) {
    PermSet m = 0;
    for (const auto& s : items_) {
      if (s.l.is_var && s.l.id == alpha) m |= s.l.pos | s.l.neg;
      if (s.r.is_var && s.r.id == alpha) m |= s.r.pos | s.r.neg;
    }
    VarSplit rec;
    rec.parent = alpha;
    for_each_assignment(m, [&](const PermissionTrace& c) {
      rec.cells.emplace_back(c, static_cast<VarId>(var_count_++));
    });
    std::vector<Simple> next;
    for (const auto& s : items_) {
      std::vector<Simple> left_done;
      if (s.l.is_var && s.l.id == alpha) {
        PermissionTrace g = s.l.guard();
        for (const auto& [c, child] : rec.cells) {
          if (!implies(c, g)) continue;
          PermissionTrace rg = s.r.guard().extended(rest(c, g));
          Simple t = s;
          t.l = {true, child, c.pos(), c.neg()};
          t.r.pos = rg.pos();
          t.r.neg = rg.neg();
          left_done.push_back(t);
        }
      } else {
        left_done.push_back(s);
      }
      for (const auto& s2 : left_done) {
        if (s2.r.is_var && s2.r.id == alpha) {
          PermissionTrace g = s2.r.guard();
          for (const auto& [c, child] : rec.cells) {
            if (!implies(c, g)) continue;
            PermissionTrace lg = s2.l.guard().extended(rest(c, g));
            Simple t = s2;
            t.r = {true, child, c.pos(), c.neg()};
            t.l = relabel(s2.l, lg);
            next.push_back(t);
          }
        } else {
          next.push_back(s2);
        }
      }
    }
    // Re-normalize ground sides whose guard was extended.
    for (auto& s : next) {
      s.r = relabel(s.r, s.r.guard());
      s.l = relabel(s.l, s.l.guard());
    }
    splits_.push_back(std::move(rec));
    items_ = std::move(next);
  }

  Side relabel(const Side& s, const PermissionTrace& guard) {
    if (s.is_var) return {true, s.id, guard.pos(), guard.neg()};
    if (guard.empty()) return {false, s.id, 0, 0};
    return {false, intern(trace_apply(grounds_[s.id], guard)), 0, 0};
  }

  const Lattice& lat_;
  std::size_t n_;
  std::size_t var_count_;
  std::vector<BaseType> grounds_;
  std::map<std::vector<Level>, std::uint32_t> ground_ids_;
  std::vector<Simple> items_;
  std::set<Simple> seen_;
  std::vector<std::vector<Simple>> lowers_;
  std::vector<std::vector<Simple>> uppers_;
  std::vector<VarSplit> splits_;
  std::optional<Unsat> unsat_;
};

}  // namespace

DecomposeResult decompose(const std::vector<GenConstraint>& constraints, const Lattice& lat,
                          std::size_t perm_count) {
  Decomposer d{lat, perm_count, {}, std::nullopt};
  d.run(constraints);
  return {std::move(d.out), std::move(d.unsat)};
}

SaturateResult saturate(const std::vector<GenConstraint>& simple, std::size_t var_count,
                        const Lattice& lat, std::size_t perm_count) {
  Saturator s(lat, perm_count, var_count);
  s.load(simple);
  return s.run();
}

MergeResult merge_bounds(const SaturateResult& saturated, const Lattice& lat,
                         std::size_t perm_count) {
  MergeResult result;
  std::vector<bool> replaced(saturated.var_count, false);
  for (const auto& s : saturated.splits) replaced[s.parent] = true;

  struct Bound {
    PermissionTrace other_guard;
    Term other;
    PermissionTrace var_guard;
  };
  std::vector<std::vector<Bound>> lowers(saturated.var_count), uppers(saturated.var_count);
  for (const auto& c : saturated.constraints) {
    bool lv = c.lhs->kind == TermNode::Kind::Var;
    bool rv = c.rhs->kind == TermNode::Kind::Var;
    bool lower = !lv || (rv && c.rhs->var < c.lhs->var);
    if (lower) {
      lowers[c.rhs->var].push_back({c.lguard, c.lhs, c.rguard});
    } else {
      uppers[c.lhs->var].push_back({c.rguard, c.rhs, c.lguard});
    }
  }

  const std::size_t sets = std::size_t{1} << perm_count;
  for (VarId v = 0; v < saturated.var_count; ++v) {
    if (replaced[v]) continue;
    // Refine ε by every guard on v until each cell decides each guard.
    std::vector<PermissionTrace> cells{PermissionTrace::epsilon()};
    auto refine = [&](const PermissionTrace& g) {
      std::vector<PermissionTrace> next;
      for (const auto& cell : cells) {
        if (!trace_and(cell, g) || implies(cell, g)) {
          next.push_back(cell);
          continue;
        }
        PermissionTrace missing = rest(g, cell);
        next.push_back(cell.extended(missing));
        for (const auto& piece : disjoint_negation(missing)) next.push_back(cell.extended(piece));
      }
      cells = std::move(next);
    };
    for (const auto& b : lowers[v]) refine(b.var_guard);
    for (const auto& b : uppers[v]) refine(b.var_guard);

    SetBits covered;
    for (const auto& cell : cells) {
      SetBits bits = denotation(cell, perm_count);
      if ((covered & bits).any()) throw std::logic_error("merge produced overlapping guards");
      covered |= bits;
    }
    if (covered.count() != sets) throw std::logic_error("merge produced a partial guard family");

    for (const auto& cell : cells) {
      Interval iv;
      iv.var = v;
      iv.guard = cell;
      bool ground = true;
      // CM-GLB / CM-LUB for this cell; a bound whose variable guard is wider
      // than the cell contributes at every assignment of that guard's
      // permissions not fixed on the bound's own side.
      auto collect = [&](const std::vector<Bound>& bounds, std::vector<BoundTerm>& into,
                         bool is_lower) {
        for (const auto& b : bounds) {
          if (!implies(cell, b.var_guard)) continue;
          PermissionTrace base = b.other_guard.extended(rest(cell, b.var_guard));
          PermSet free = static_cast<PermSet>(b.var_guard.mentioned() & ~base.mentioned());
          if (b.other->kind == TermNode::Kind::Ground) {
            BaseType acc = embed(is_lower ? lat.bottom() : lat.top(), perm_count);
            for_each_assignment(free, [&](const PermissionTrace& s) {
              BaseType t = trace_apply(b.other->ground, base.extended(s));
              acc = is_lower ? bt_join(lat, acc, t) : bt_meet(lat, acc, t);
            });
            into.push_back({ground_term(acc), PermissionTrace::epsilon()});
          } else {
            ground = false;
            for_each_assignment(free, [&](const PermissionTrace& s) {
              into.push_back({b.other, base.extended(s)});
            });
          }
        }
      };
      collect(lowers[v], iv.lower, true);
      collect(uppers[v], iv.upper, false);
      if (ground) {
        BaseType lo = embed(lat.bottom(), perm_count);
        for (const auto& b : iv.lower) lo = bt_join(lat, lo, b.atom->ground);
        BaseType hi = embed(lat.top(), perm_count);
        for (const auto& b : iv.upper) hi = bt_meet(lat, hi, b.atom->ground);
        if (auto w = first_failure(lat, lo, hi, cell)) {
          if (!result.unsat) {
            Unsat u;
            u.stage = Unsat::Stage::Merge;
            u.reason = "EmptyInterval";
            u.var = v;
            u.witness = *w;
            u.refuted = GenConstraint{cell, ground_term(lo), cell, ground_term(hi)};
            result.unsat = u;
          }
        }
        iv.lo = lo;
        iv.hi = hi;
      }
      result.intervals.push_back(std::move(iv));
    }
  }
  return result;
}

UnifyResult unify(std::vector<Interval> intervals, const SaturateResult& saturated,
                  std::size_t original_var_count, const Lattice& lat, std::size_t perm_count) {
  UnifyResult result;
  std::map<VarId, std::vector<std::size_t>> by_var;
  for (std::size_t i = 0; i < intervals.size(); ++i) by_var[intervals[i].var].push_back(i);

  Substitution theta;
  for (auto it = by_var.rbegin(); it != by_var.rend(); ++it) {
    VarId v = it->first;
    BaseType t = embed(lat.bottom(), perm_count);
    for (std::size_t idx : it->second) {
      Interval& iv = intervals[idx];
      BaseType lo = embed(lat.bottom(), perm_count);
      for (const auto& b : iv.lower) {
        lo = bt_join(lat, lo, trace_apply(eval_term(b.atom, lat, perm_count, theta), b.trace));
      }
      BaseType hi = embed(lat.top(), perm_count);
      for (const auto& b : iv.upper) {
        hi = bt_meet(lat, hi, trace_apply(eval_term(b.atom, lat, perm_count, theta), b.trace));
      }
      iv.lo = lo;
      iv.hi = hi;
      if (auto w = first_failure(lat, lo, hi, iv.guard)) {
        if (!result.unsat) {
          Unsat u;
          u.stage = Unsat::Stage::Unify;
          u.reason = "EmptyInterval";
          u.var = v;
          u.witness = *w;
          u.refuted = GenConstraint{iv.guard, ground_term(lo), iv.guard, ground_term(hi)};
          result.unsat = u;
        }
      }
      // (Λ, α) = (lo ⊔ α_i) ⊓ hi with the residual α_i at bottom.
      BaseType value = bt_meet(lat, lo, hi);
      for (std::size_t s = 0; s < t.size(); ++s) {
        auto set = static_cast<PermSet>(s);
        if (iv.guard.entails_by(set)) t.set(set, value.at(set));
      }
    }
    theta[v] = std::move(t);
  }
  for (auto it = saturated.splits.rbegin(); it != saturated.splits.rend(); ++it) {
    BaseType t = embed(lat.bottom(), perm_count);
    for (std::size_t s = 0; s < t.size(); ++s) {
      auto set = static_cast<PermSet>(s);
      for (const auto& [cell, child] : it->cells) {
        if (!cell.entails_by(set)) continue;
        auto found = theta.find(child);
        if (found != theta.end()) t.set(set, found->second.at(set));
      }
    }
    theta[it->parent] = std::move(t);
  }
  for (VarId v = 0; v < original_var_count; ++v) {
    auto found = theta.find(v);
    result.theta[v] = found != theta.end() ? found->second : embed(lat.bottom(), perm_count);
  }
  result.intervals = std::move(intervals);
  return result;
}

namespace {

SolveResult solve_once(const ConstraintSystem& cs, const Lattice& lat) {
  SolveResult result;
  const std::size_t n = cs.perm_count;
  auto gen = generalize(cs.constraints);
  DecomposeResult d = decompose(gen, lat, n);
  result.simple_count = d.constraints.size();
  if (d.unsat) {
    result.unsat = std::move(d.unsat);
    return result;
  }
  SaturateResult s = saturate(d.constraints, cs.vars.size(), lat, n);
  result.saturated_count = s.constraints.size();
  if (s.unsat) {
    result.unsat = std::move(s.unsat);
    return result;
  }
  MergeResult m = merge_bounds(s, lat, n);
  if (m.unsat) {
    result.unsat = std::move(m.unsat);
    return result;
  }
  UnifyResult u = unify(std::move(m.intervals), s, cs.vars.size(), lat, n);
  result.intervals = std::move(u.intervals);
  if (u.unsat) {
    result.unsat = std::move(u.unsat);
    return result;
  }
  result.theta = std::move(u.theta);
  for (const auto& c : cs.constraints) {
    if (!satisfies(lat, n, result.theta, c)) {
      throw std::logic_error("solver returned a substitution that violates " +
                             format_constraint(c, lat, PermissionUniverse{}, &cs.vars));
    }
  }
  result.sat = true;
  return result;
}

}  // namespace

SolveResult solve(const ConstraintSystem& cs, const Lattice& lat, const SolveOptions& options) {
  SolveResult result = solve_once(cs, lat);
  if (result.sat || !options.minimize_core) return result;
  // Greedy deletion: drop each constraint whose absence keeps the set unsat.
  std::vector<std::size_t> core;
  for (std::size_t i = 0; i < cs.constraints.size(); ++i) core.push_back(i);
  for (std::size_t k = 0; k < cs.constraints.size(); ++k) {
    ConstraintSystem trial;
    trial.perm_count = cs.perm_count;
    trial.vars = cs.vars;
    std::vector<std::size_t> kept;
    for (std::size_t i : core) {
      if (i == k) continue;
      kept.push_back(i);
      trial.constraints.push_back(cs.constraints[i]);
    }
    if (kept.size() == core.size()) continue;
    if (!solve_once(trial, lat).sat) core = std::move(kept);
  }
  result.unsat->core = std::move(core);
  return result;
}

}  // namespace permflow
