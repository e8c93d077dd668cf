#pragma once

#include <bitset>
#include <optional>
#include <string>
#include <vector>

#include "permflow/perm_types.hpp"

namespace permflow {

enum class Sign : std::uint8_t { Plus, Minus };

/// A consistent permission trace in canonical form: the set of promoted and
/// the set of demoted permissions. Order and repetition carry no meaning.
class PermissionTrace {
 public:
  PermissionTrace() = default;
  /// Throws AlgebraError (InconsistentTrace) if pos and neg overlap.
  PermissionTrace(PermSet pos, PermSet neg);

  static PermissionTrace epsilon() { return {}; }
  static PermissionTrace literal(Perm p, Sign s);
  /// The full sign assignment of `set`: the only trace that `set` alone entails.
  static PermissionTrace exactly(PermSet set, PermSet universe_full);

  PermSet pos() const { return pos_; }
  PermSet neg() const { return neg_; }
  PermSet mentioned() const { return pos_ | neg_; }
  bool empty() const { return (pos_ | neg_) == 0; }
  bool mentions(Perm p) const { return contains(mentioned(), p); }

  /// Λ :: ±p. Appending a permission already on the trace has no effect, since
  /// only the first occurrence matters.
  PermissionTrace extended(Perm p, Sign s) const;
  /// Λ :: Λ' with the same first-wins reading.
  PermissionTrace extended(const PermissionTrace& tail) const;

  bool entails_by(PermSet set) const { return (set & pos_) == pos_ && (set & neg_) == 0; }
  /// The permission set at which t·Λ is evaluated for caller set `set`.
  PermSet apply_to(PermSet set) const {
    return static_cast<PermSet>((set | pos_) & ~neg_);
  }

  std::string format(const PermissionUniverse& universe) const;

  friend bool operator==(const PermissionTrace&, const PermissionTrace&) = default;
  friend auto operator<=>(const PermissionTrace&, const PermissionTrace&) = default;

 private:
  PermSet pos_ = 0;
  PermSet neg_ = 0;
};

BaseType trace_apply(const BaseType& t, const PermissionTrace& trace);
bool trace_entails(PermSet set, const PermissionTrace& trace);
/// True iff some permission set over `perm_count` permissions entails the trace.
bool trace_sat(const PermissionTrace& trace, std::size_t perm_count);
/// Conjunction; empty if the two traces disagree on some permission.
std::optional<PermissionTrace> trace_and(const PermissionTrace& a, const PermissionTrace& b);
/// Literals of `a` absent from `b`.
PermissionTrace trace_diff(const PermissionTrace& a, const PermissionTrace& b);
/// s ≤_Λ t, i.e. s·Λ ≤ t·Λ.
bool leq_under(const Lattice& lat, const BaseType& s, const BaseType& t,
               const PermissionTrace& trace);
/// First permission set entailing Λ at which s(P) is not below t(P).
std::optional<PermSet> leq_under_witness(const Lattice& lat, const BaseType& s,
                                         const BaseType& t, const PermissionTrace& trace);

inline constexpr std::size_t kMaxSets = std::size_t{1} << kMaxPermissions;
using SetBits = std::bitset<kMaxSets>;

/// Disjunction of traces, kept alongside its denotation as a set of
/// permission sets. The denotation is authoritative for sat and entailment.
class TraceFormula {
 public:
  explicit TraceFormula(std::size_t perm_count) : perm_count_(perm_count) {}

  static TraceFormula of(const PermissionTrace& trace, std::size_t perm_count);
  static TraceFormula falsum(std::size_t perm_count) { return TraceFormula(perm_count); }

  const std::vector<PermissionTrace>& disjuncts() const { return disjuncts_; }
  const SetBits& denotation() const { return bits_; }
  std::size_t perm_count() const { return perm_count_; }

  bool sat() const { return bits_.any(); }
  bool entails_by(PermSet set) const { return bits_.test(set); }

  TraceFormula operator||(const TraceFormula& other) const;
  TraceFormula operator&&(const TraceFormula& other) const;

  std::string format(const PermissionUniverse& universe) const;

 private:
  void add(const PermissionTrace& trace);

  std::size_t perm_count_;
  std::vector<PermissionTrace> disjuncts_;
  SetBits bits_;
};

SetBits denotation(const PermissionTrace& trace, std::size_t perm_count);
TraceFormula formula_and(const PermissionTrace& a, const PermissionTrace& b,
                         std::size_t perm_count);
/// De Morgan: one disjunct per flipped literal.
TraceFormula neg_dnf(const PermissionTrace& trace, std::size_t perm_count);
/// ¬Λ as pairwise disjoint traces: ¬l1 ∨ (l1∧¬l2) ∨ (l1∧l2∧¬l3) ∨ ...
std::vector<PermissionTrace> disjoint_negation(const PermissionTrace& trace);

}  // namespace permflow
