#include "permflow/lattice.hpp"

#include <map>

#include "permflow/diagnostics.hpp"

namespace permflow {

namespace {

// Least element of `candidates` w.r.t. `below`, if it is unique and below all.
std::optional<std::size_t> least(const std::vector<std::size_t>& candidates,
                                 const std::vector<bool>& below, std::size_t n) {
  for (std::size_t c : candidates) {
    bool all = true;
    for (std::size_t d : candidates) {
      if (!below[c * n + d]) {
        all = false;
        break;
      }
    }
    if (all) {
      return c;
    }
  }
  return std::nullopt;
}

}  // namespace

Lattice Lattice::load(const Spec& spec) {
  const std::size_t n = spec.names.size();
  if (n == 0) {
    throw InputError(DiagnosticKind::NotALattice, {}, "lattice has no levels");
  }
  if (n > kMaxLevels) {
    throw InputError(DiagnosticKind::NotALattice, {},
                     "lattice has " + std::to_string(n) + " levels; at most " +
                         std::to_string(kMaxLevels) + " are supported");
  }
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(spec.names[i], i).second) {
      throw InputError(DiagnosticKind::DuplicateName, {},
                       "level '" + spec.names[i] + "' declared twice");
    }
  }
  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw InputError(DiagnosticKind::UnknownLevelName, {},
                       "unknown level '" + name + "'");
    }
    return it->second;
  };

  std::vector<bool> leq(n * n, false);
  for (std::size_t i = 0; i < n; ++i) {
    leq[i * n + i] = true;
  }
  for (const auto& [a, b] : spec.order) {
    std::size_t ia = lookup(a);
    std::size_t ib = lookup(b);
    if (ia == ib) {
      throw InputError(DiagnosticKind::CycleInOrder, {},
                       "level '" + a + "' is ordered below itself");
    }
    leq[ia * n + ib] = true;
  }
  // Warshall closure.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!leq[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (leq[k * n + j]) leq[i * n + j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (leq[i * n + j] && leq[j * n + i]) {
        throw InputError(DiagnosticKind::CycleInOrder, {},
                         "levels '" + spec.names[i] + "' and '" + spec.names[j] +
                             "' are ordered both ways");
      }
    }
  }

  Lattice lat;
  lat.names_ = spec.names;
  lat.n_ = n;
  lat.leq_ = leq;
  lat.join_.resize(n * n);
  lat.meet_.resize(n * n);

  std::vector<bool> geq(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      geq[i * n + j] = leq[j * n + i];
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<std::size_t> upper, lower;
      for (std::size_t c = 0; c < n; ++c) {
        if (leq[a * n + c] && leq[b * n + c]) upper.push_back(c);
        if (leq[c * n + a] && leq[c * n + b]) lower.push_back(c);
      }
      auto lub = least(upper, leq, n);
      auto glb = least(lower, geq, n);
      if (!lub || !glb) {
        throw InputError(DiagnosticKind::NotALattice, {},
                         "levels '" + spec.names[a] + "' and '" + spec.names[b] +
                             "' have no " + (lub ? "greatest lower" : "least upper") +
                             " bound");
      }
      lat.join_[a * n + b] = static_cast<Level>(*lub);
      lat.meet_[a * n + b] = static_cast<Level>(*glb);
    }
  }
  Level bot = 0;
  Level top = 0;
  for (std::size_t i = 1; i < n; ++i) {
    bot = lat.meet_[bot * n + i];
    top = lat.join_[top * n + i];
  }
  lat.bottom_ = bot;
  lat.top_ = top;
  return lat;
}

Lattice Lattice::chain(const std::vector<std::string>& names) {
  Spec spec;
  spec.names = names;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) {
    spec.order.emplace_back(names[i], names[i + 1]);
  }
  return load(spec);
}

std::optional<Level> Lattice::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<Level>(i);
  }
  return std::nullopt;
}

Level Lattice::level(std::string_view name) const {
  if (auto l = find(name)) return *l;
  throw InputError(DiagnosticKind::UnknownLevelName, {},
                   "unknown level '" + std::string(name) + "'");
}

std::vector<std::pair<Level, Level>> Lattice::covers() const {
  std::vector<std::pair<Level, Level>> out;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      if (a == b || !leq_[a * n_ + b]) continue;
      bool direct = true;
      for (std::size_t c = 0; c < n_ && direct; ++c) {
        if (c != a && c != b && leq_[a * n_ + c] && leq_[c * n_ + b]) direct = false;
      }
      if (direct) out.emplace_back(static_cast<Level>(a), static_cast<Level>(b));
    }
  }
  return out;
}

}  // namespace permflow
