#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "permflow/lattice.hpp"

namespace permflow {

/// A set of permissions as a bitmask over the universe's indices.
using PermSet = std::uint16_t;
using Perm = std::uint8_t;

inline constexpr std::size_t kMaxPermissions = 12;

inline constexpr PermSet perm_bit(Perm p) { return static_cast<PermSet>(1u << p); }
inline constexpr bool contains(PermSet set, Perm p) { return (set >> p) & 1u; }

class PermissionUniverse {
 public:
  PermissionUniverse() = default;
  explicit PermissionUniverse(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  /// Number of permission sets, 2^|P|.
  std::size_t set_count() const { return std::size_t{1} << names_.size(); }
  PermSet full() const { return static_cast<PermSet>(set_count() - 1); }
  const std::string& name(Perm p) const { return names_.at(p); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<Perm> find(std::string_view name) const;
  /// Like find, but throws InputError(UnknownPermission).
  Perm perm(std::string_view name) const;
  /// Parses a comma separated list of names ("" is the empty set).
  PermSet parse_set(std::string_view list) const;

  /// "{p,q}" with members in declaration order.
  std::string format(PermSet set) const;

  friend bool operator==(const PermissionUniverse&, const PermissionUniverse&) = default;

 private:
  std::vector<std::string> names_;
};

/// A permission-dependent security type: a total map from permission sets to
/// levels, stored densely and indexed by the PermSet bitmask.
class BaseType {
 public:
  BaseType() = default;

  static BaseType embed(Level l, std::size_t perm_count);
  static BaseType from_table(std::vector<Level> table);

  std::size_t perm_count() const { return perm_count_; }
  std::size_t size() const { return table_.size(); }
  Level at(PermSet set) const { return table_[set]; }
  void set(PermSet set, Level l) { table_[set] = l; }
  const std::vector<Level>& table() const { return table_; }

  bool is_constant() const;

  friend bool operator==(const BaseType&, const BaseType&) = default;
  friend auto operator<=>(const BaseType&, const BaseType&) = default;

 private:
  std::size_t perm_count_ = 0;
  std::vector<Level> table_;
};

BaseType embed(Level l, std::size_t perm_count);
bool bt_leq(const Lattice& lat, const BaseType& s, const BaseType& t);
BaseType bt_join(const Lattice& lat, const BaseType& s, const BaseType& t);
BaseType bt_meet(const Lattice& lat, const BaseType& s, const BaseType& t);
/// First permission set (in bitmask order) where s(P) is not below t(P).
std::optional<PermSet> bt_leq_witness(const Lattice& lat, const BaseType& s,
                                      const BaseType& t);

BaseType promote(const BaseType& t, Perm p);
BaseType demote(const BaseType& t, Perm p);
BaseType project(const BaseType& t, PermSet set);
BaseType merge(Perm p, const BaseType& t1, const BaseType& t2);

/// Literal syntax, e.g. `{ {p,q}: H, {p}: l1, _: L }`. The most frequent level
/// becomes the default; constant types print as the bare level name.
std::string format_base_type(const BaseType& t, const Lattice& lat,
                             const PermissionUniverse& universe);

struct FunctionType {
  std::vector<BaseType> params;
  BaseType ret;

  friend bool operator==(const FunctionType&, const FunctionType&) = default;
};

std::string format_function_type(const FunctionType& ft, const Lattice& lat,
                                 const PermissionUniverse& universe);

}  // namespace permflow
