#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permflow {

using Level = std::uint8_t;

inline constexpr std::size_t kMaxLevels = 64;

/// A finite security lattice with precomputed order, join and meet tables.
/// Immutable once loaded.
class Lattice {
 public:
  struct Spec {
    std::vector<std::string> names;
    // Each pair (a, b) asserts a < b.
    std::vector<std::pair<std::string, std::string>> order;
  };

  static Lattice load(const Spec& spec);
  /// Convenience: a chain with the given names, bottom first.
  static Lattice chain(const std::vector<std::string>& names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Level l) const { return names_.at(l); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<Level> find(std::string_view name) const;
  /// Like find, but throws InputError(UnknownLevelName).
  Level level(std::string_view name) const;

  bool leq(Level a, Level b) const { return leq_[a * n_ + b]; }
  Level join(Level a, Level b) const { return join_[a * n_ + b]; }
  Level meet(Level a, Level b) const { return meet_[a * n_ + b]; }
  Level bottom() const { return bottom_; }
  Level top() const { return top_; }

  /// The covering pairs (a, b) with a < b and nothing strictly between.
  std::vector<std::pair<Level, Level>> covers() const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.names_ == b.names_ && a.leq_ == b.leq_;
  }

 private:
  Lattice() = default;

  std::vector<std::string> names_;
  std::size_t n_ = 0;
  std::vector<bool> leq_;
  std::vector<Level> join_;
  std::vector<Level> meet_;
  Level bottom_ = 0;
  Level top_ = 0;
};

}  // namespace permflow
