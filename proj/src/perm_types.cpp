#include "permflow/perm_types.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "permflow/diagnostics.hpp"

namespace permflow {

namespace {

void require_same_universe(const BaseType& s, const BaseType& t) {
  if (s.perm_count() != t.perm_count() || s.size() != t.size()) {
    throw AlgebraError("UniverseMismatch: base types over " +
                       std::to_string(s.perm_count()) + " and " +
                       std::to_string(t.perm_count()) + " permissions");
  }
}

void require_perm(const BaseType& t, Perm p) {
  if (p >= t.perm_count()) {
    throw InputError(DiagnosticKind::UnknownPermission, {},
                     "permission index " + std::to_string(p) + " outside universe of size " +
                         std::to_string(t.perm_count()));
  }
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

PermissionUniverse::PermissionUniverse(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.size() > kMaxPermissions) {
    throw InputError(DiagnosticKind::UniverseTooLarge, {},
                     std::to_string(names_.size()) + " permissions declared; at most " +
                         std::to_string(kMaxPermissions) + " are supported");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) {
        throw InputError(DiagnosticKind::DuplicateName, {},
                         "permission '" + names_[i] + "' declared twice");
      }
    }
  }
}

std::optional<Perm> PermissionUniverse::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<Perm>(i);
  }
  return std::nullopt;
}

Perm PermissionUniverse::perm(std::string_view name) const {
  if (auto p = find(name)) return *p;
  throw InputError(DiagnosticKind::UnknownPermission, {},
                   "unknown permission '" + std::string(name) + "'");
}

PermSet PermissionUniverse::parse_set(std::string_view list) const {
  PermSet set = 0;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string item = trim(list.substr(pos, comma - pos));
    if (!item.empty()) set |= perm_bit(perm(item));
    pos = comma + 1;
  }
  return set;
}

std::string PermissionUniverse::format(PermSet set) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!contains(set, static_cast<Perm>(i))) continue;
    if (!first) out += ",";
    out += names_[i];
    first = false;
  }
  return out + "}";
}

BaseType BaseType::embed(Level l, std::size_t perm_count) {
  BaseType t;
  t.perm_count_ = perm_count;
  t.table_.assign(std::size_t{1} << perm_count, l);
  return t;
}

BaseType BaseType::from_table(std::vector<Level> table) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < table.size()) ++n;
  if ((std::size_t{1} << n) != table.size() || table.empty()) {
    throw AlgebraError("base type table size must be a power of two");
  }
  BaseType t;
  t.perm_count_ = n;
  t.table_ = std::move(table);
  return t;
}

bool BaseType::is_constant() const {
  return std::all_of(table_.begin(), table_.end(),
                     [&](Level l) { return l == table_.front(); });
}

BaseType embed(Level l, std::size_t perm_count) { return BaseType::embed(l, perm_count); }

bool bt_leq(const Lattice& lat, const BaseType& s, const BaseType& t) {
  return !bt_leq_witness(lat, s, t).has_value();
}

std::optional<PermSet> bt_leq_witness(const Lattice& lat, const BaseType& s,
                                      const BaseType& t) {
  require_same_universe(s, t);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    if (!lat.leq(s.at(set), t.at(set))) return set;
  }
  return std::nullopt;
}

BaseType bt_join(const Lattice& lat, const BaseType& s, const BaseType& t) {
  require_same_universe(s, t);
  BaseType out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    out.set(set, lat.join(s.at(set), t.at(set)));
  }
  return out;
}

BaseType bt_meet(const Lattice& lat, const BaseType& s, const BaseType& t) {
  require_same_universe(s, t);
  BaseType out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    out.set(set, lat.meet(s.at(set), t.at(set)));
  }
  return out;
}

BaseType promote(const BaseType& t, Perm p) {
  require_perm(t, p);
  BaseType out = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    out.set(set, t.at(set | perm_bit(p)));
  }
  return out;
}

BaseType demote(const BaseType& t, Perm p) {
  require_perm(t, p);
  BaseType out = t;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    out.set(set, t.at(set & ~perm_bit(p)));
  }
  return out;
}

BaseType project(const BaseType& t, PermSet set) {
  return BaseType::embed(t.at(set), t.perm_count());
}

BaseType merge(Perm p, const BaseType& t1, const BaseType& t2) {
  require_same_universe(t1, t2);
  require_perm(t1, p);
  BaseType out = t1;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    auto set = static_cast<PermSet>(i);
    out.set(set, contains(set, p) ? t1.at(set) : t2.at(set));
  }
  return out;
}

std::string format_base_type(const BaseType& t, const Lattice& lat,
                             const PermissionUniverse& universe) {
  if (t.is_constant()) return lat.name(t.at(0));
  std::map<Level, std::size_t> freq;
  for (Level l : t.table()) ++freq[l];
  Level dflt = freq.begin()->first;
  for (const auto& [l, c] : freq) {
    if (c > freq[dflt]) dflt = l;
  }
  std::vector<PermSet> sets;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.at(static_cast<PermSet>(i)) != dflt) sets.push_back(static_cast<PermSet>(i));
  }
  std::stable_sort(sets.begin(), sets.end(), [](PermSet a, PermSet b) {
    int ca = std::popcount(a), cb = std::popcount(b);
    return ca != cb ? ca > cb : a < b;
  });
  std::string out = "{ ";
  for (PermSet s : sets) {
    out += universe.format(s) + ": " + lat.name(t.at(s)) + ", ";
  }
  out += "_: " + lat.name(dflt) + " }";
  return out;
}

std::string format_function_type(const FunctionType& ft, const Lattice& lat,
                                 const PermissionUniverse& universe) {
  std::string out = "(";
  for (std::size_t i = 0; i < ft.params.size(); ++i) {
    if (i) out += ", ";
    out += format_base_type(ft.params[i], lat, universe);
  }
  return out + ") -> " + format_base_type(ft.ret, lat, universe);
}

}  // namespace permflow
