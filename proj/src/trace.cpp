#include "permflow/trace.hpp"

#include "permflow/diagnostics.hpp"

namespace permflow {

PermissionTrace::PermissionTrace(PermSet pos, PermSet neg) : pos_(pos), neg_(neg) {
  if (pos & neg) {
    throw AlgebraError("InconsistentTrace: a permission is both promoted and demoted");
  }
}

PermissionTrace PermissionTrace::literal(Perm p, Sign s) {
  return s == Sign::Plus ? PermissionTrace(perm_bit(p), 0) : PermissionTrace(0, perm_bit(p));
}

PermissionTrace PermissionTrace::exactly(PermSet set, PermSet universe_full) {
  return PermissionTrace(set, static_cast<PermSet>(universe_full & ~set));
}

PermissionTrace PermissionTrace::extended(Perm p, Sign s) const {
  if (mentions(p)) return *this;
  PermissionTrace out = *this;
  (s == Sign::Plus ? out.pos_ : out.neg_) |= perm_bit(p);
  return out;
}

PermissionTrace PermissionTrace::extended(const PermissionTrace& tail) const {
  PermSet fresh = static_cast<PermSet>(~mentioned());
  return PermissionTrace(pos_ | (tail.pos_ & fresh), neg_ | (tail.neg_ & fresh));
}

std::string PermissionTrace::format(const PermissionUniverse& universe) const {
  if (empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    auto p = static_cast<Perm>(i);
    if (contains(pos_, p)) out += "+" + universe.name(p);
    if (contains(neg_, p)) out += "-" + universe.name(p);
  }
  return out;
}

BaseType trace_apply(const BaseType& t, const PermissionTrace& trace) {
  BaseType out = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    out.set(set, t.at(trace.apply_to(set)));
  }
  return out;
}

bool trace_entails(PermSet set, const PermissionTrace& trace) { return trace.entails_by(set); }

bool trace_sat(const PermissionTrace& trace, std::size_t perm_count) {
  // Canonical traces are consistent; only permissions outside the universe
  // can make them unsatisfiable.
  PermSet full = static_cast<PermSet>((std::size_t{1} << perm_count) - 1);
  return (trace.pos() & ~full) == 0;
}

std::optional<PermissionTrace> trace_and(const PermissionTrace& a, const PermissionTrace& b) {
  PermSet pos = a.pos() | b.pos();
  PermSet neg = a.neg() | b.neg();
  if (pos & neg) return std::nullopt;
  return PermissionTrace(pos, neg);
}

PermissionTrace trace_diff(const PermissionTrace& a, const PermissionTrace& b) {
  return PermissionTrace(static_cast<PermSet>(a.pos() & ~b.pos()),
                         static_cast<PermSet>(a.neg() & ~b.neg()));
}

bool leq_under(const Lattice& lat, const BaseType& s, const BaseType& t,
               const PermissionTrace& trace) {
  return bt_leq(lat, trace_apply(s, trace), trace_apply(t, trace));
}

std::optional<PermSet> leq_under_witness(const Lattice& lat, const BaseType& s,
                                         const BaseType& t, const PermissionTrace& trace) {
  // (s·Λ)(P) = s(P') with P' entailing Λ, and every Λ-entailing set is its own
  // image, so the failing points of s·Λ ≤ t·Λ are exactly reflected at the
  // Λ-entailing sets.
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    if (!trace.entails_by(set)) continue;
    if (!lat.leq(s.at(set), t.at(set))) return set;
  }
  return std::nullopt;
}

SetBits denotation(const PermissionTrace& trace, std::size_t perm_count) {
  SetBits bits;
  for (std::size_t i = 0; i < (std::size_t{1} << perm_count); ++i) {
    if (trace.entails_by(static_cast<PermSet>(i))) bits.set(i);
  }
  return bits;
}

TraceFormula TraceFormula::of(const PermissionTrace& trace, std::size_t perm_count) {
  TraceFormula f(perm_count);
  f.add(trace);
  return f;
}

void TraceFormula::add(const PermissionTrace& trace) {
  for (const auto& d : disjuncts_) {
    if (d == trace) return;
  }
  disjuncts_.push_back(trace);
  bits_ |= permflow::denotation(trace, perm_count_);
}

TraceFormula TraceFormula::operator||(const TraceFormula& other) const {
  TraceFormula out = *this;
  for (const auto& d : other.disjuncts_) out.add(d);
  return out;
}

TraceFormula TraceFormula::operator&&(const TraceFormula& other) const {
  TraceFormula out(perm_count_);
  for (const auto& a : disjuncts_) {
    for (const auto& b : other.disjuncts_) {
      if (auto c = trace_and(a, b)) out.add(*c);
    }
  }
  return out;
}

std::string TraceFormula::format(const PermissionUniverse& universe) const {
  if (disjuncts_.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < disjuncts_.size(); ++i) {
    if (i) out += " | ";
    out += disjuncts_[i].format(universe);
  }
  return out;
}

TraceFormula formula_and(const PermissionTrace& a, const PermissionTrace& b,
                         std::size_t perm_count) {
  return TraceFormula::of(a, perm_count) && TraceFormula::of(b, perm_count);
}

TraceFormula neg_dnf(const PermissionTrace& trace, std::size_t perm_count) {
  TraceFormula out(perm_count);
  for (std::size_t i = 0; i < kMaxPermissions; ++i) {
    auto p = static_cast<Perm>(i);
    if (contains(trace.pos(), p)) out = out || TraceFormula::of(PermissionTrace::literal(p, Sign::Minus), perm_count);
    if (contains(trace.neg(), p)) out = out || TraceFormula::of(PermissionTrace::literal(p, Sign::Plus), perm_count);
  }
  return out;
}

std::vector<PermissionTrace> disjoint_negation(const PermissionTrace& trace) {
  std::vector<PermissionTrace> out;
  PermissionTrace prefix;
  for (std::size_t i = 0; i < kMaxPermissions; ++i) {
    auto p = static_cast<Perm>(i);
    if (!trace.mentions(p)) continue;
    Sign s = contains(trace.pos(), p) ? Sign::Plus : Sign::Minus;
    Sign flipped = s == Sign::Plus ? Sign::Minus : Sign::Plus;
    out.push_back(prefix.extended(p, flipped));
    prefix = prefix.extended(p, s);
  }
  return out;
}

}  // namespace permflow
