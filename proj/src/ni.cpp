#include "permflow/ni.hpp"

#include <stdexcept>

namespace permflow {

const char* to_string(NIVerdict v) {
  switch (v) {
    case NIVerdict::Ok: return "ok";
    case NIVerdict::Violation: return "violation";
    case NIVerdict::Inconclusive: return "inconclusive";
    case NIVerdict::Skipped: return "skipped";
  }
  return "?";
}

std::size_t NIReport::count(NIVerdict v) const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.verdict == v;
  return n;
}

bool indistinguishable(const EvalEnv& a, const EvalEnv& b, const TypingEnv& gamma,
                       const Lattice& lat, Level observer) {
  for (const auto& [x, t] : gamma) {
    if (!bt_leq(lat, t, embed(observer, t.perm_count()))) continue;
    auto ia = a.find(x);
    auto ib = b.find(x);
    bool da = ia != a.end();
    bool db = ib != b.end();
    if (da != db) return false;
    if (da && ia->second != ib->second) return false;
  }
  return true;
}

TypingEnv project_env(const TypingEnv& gamma, PermSet perms) {
  TypingEnv out;
  for (const auto& [x, t] : gamma) out[x] = project(t, perms);
  return out;
}

EvalEnv replay(const System& sys, const std::string& function, const EvalEnv& init,
               const std::map<std::string, std::int64_t>& constants, PermSet perms,
               std::uint64_t fuel) {
  System copy = sys;
  for (auto& c : copy.constants) {
    auto it = constants.find(c.name);
    if (it != constants.end()) c.value = it->second;
  }
  const FunDecl* f = copy.find_function(function);
  if (!f) throw std::invalid_argument("unknown function " + function);
  Interpreter interp(copy);
  return interp.run_function(*f, init, perms, &fuel);
}

namespace {

// One varied input: a parameter, r, or a secret constant.
struct Slot {
  std::string name;
  bool constant = false;
  bool observable = false;
};

struct Run {
  bool done = false;
  EvalEnv out;
};

}  // namespace

NICell nitest_cell(const System& sys, const FunctionTable& ft, const std::string& function,
                   PermSet perms, Level observer, const NIConfig& cfg) {
  const FunDecl* f = sys.find_function(function);
  if (!f) throw std::invalid_argument("unknown function " + function);
  const FunctionType& type = ft.at(function);
  const Lattice& lat = sys.lattice;
  if (cfg.domain_hi <= cfg.domain_lo) throw std::invalid_argument("domain needs two values");

  NICell cell;
  cell.function = function;
  cell.perms = perms;
  cell.observer = observer;
  cell.strict = cfg.strict;
  if (!cfg.strict && !lat.leq(type.ret.at(perms), observer)) {
    cell.verdict = NIVerdict::Skipped;
    cell.note = "result type not observable";
    return cell;
  }

  TypingEnv gamma;
  for (std::size_t i = 0; i < f->params.size(); ++i) gamma[f->params[i].name] = type.params[i];
  gamma[kReturnVar] = type.ret;
  TypingEnv at_p = project_env(gamma, perms);

  std::vector<Slot> slots;
  for (const auto& [x, t] : at_p) slots.push_back({x, false, lat.leq(t.at(0), observer)});
  // Constants with a fixed level above the observer are secrets the
  // function may read; they vary like unobservable inputs.
  for (const auto& c : sys.constants) {
    if (c.type.is_constant() && !lat.leq(c.type.at(0), observer)) {
      slots.push_back({c.name, true, false});
    }
  }

  const auto d = static_cast<std::uint64_t>(cfg.domain_hi - cfg.domain_lo + 1);
  std::uint64_t obs_count = 1;
  std::uint64_t hidden_count = 1;
  auto mul = [&](std::uint64_t& acc) {
    if (acc > cfg.pair_cap) return;
    acc *= d;
  };
  for (const auto& s : slots) mul(s.observable ? obs_count : hidden_count);
  std::uint64_t pairs_per_obs = hidden_count > cfg.pair_cap ? cfg.pair_cap + 1
                                                             : hidden_count * hidden_count;
  if (obs_count > cfg.pair_cap || pairs_per_obs > cfg.pair_cap ||
      obs_count * pairs_per_obs > cfg.pair_cap) {
    cell.verdict = NIVerdict::Inconclusive;
    cell.note = "SearchSpaceTooLarge";
    return cell;
  }

  std::vector<std::size_t> obs_idx, hidden_idx;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    (slots[i].observable ? obs_idx : hidden_idx).push_back(i);
  }
  auto assign = [&](std::uint64_t code, const std::vector<std::size_t>& idx,
                    std::vector<std::int64_t>& values) {
    for (std::size_t i : idx) {
      values[i] = cfg.domain_lo + static_cast<std::int64_t>(code % d);
      code /= d;
    }
  };

  System work = sys;
  const FunDecl* work_f = work.find_function(function);
  Interpreter interp(work);
  bool inconclusive = false;
  std::vector<std::int64_t> values(slots.size());
  for (std::uint64_t o = 0; o < obs_count; ++o) {
    assign(o, obs_idx, values);
    std::vector<Run> runs(hidden_count);
    std::vector<EvalEnv> inits(hidden_count);
    std::vector<std::map<std::string, std::int64_t>> consts(hidden_count);
    for (std::uint64_t h = 0; h < hidden_count; ++h) {
      assign(h, hidden_idx, values);
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].constant) {
          consts[h][slots[i].name] = values[i];
        } else {
          inits[h][slots[i].name] = values[i];
        }
      }
      try {
        for (auto& c : work.constants) {
          auto it = consts[h].find(c.name);
          if (it != consts[h].end()) c.value = it->second;
        }
        std::uint64_t fuel = cfg.fuel;
        runs[h].out = interp.run_function(*work_f, inits[h], perms, &fuel);
        runs[h].done = true;
      } catch (const FuelExhausted&) {
        inconclusive = true;
      }
    }
    // Every pair of hidden assignments under this observable assignment is
    // indistinguishable by construction.
    for (std::uint64_t a = 0; a < hidden_count; ++a) {
      for (std::uint64_t b = a + 1; b < hidden_count; ++b) {
        cell.pairs_tested += 2;
        if (!runs[a].done || !runs[b].done) continue;
        std::string differing;
        if (cfg.strict) {
          for (const auto& [x, t] : at_p) {
            if (lat.leq(t.at(0), observer) && runs[a].out.at(x) != runs[b].out.at(x)) {
              differing = x;
              break;
            }
          }
        } else if (runs[a].out.at(kReturnVar) != runs[b].out.at(kReturnVar)) {
          differing = kReturnVar;
        }
        if (differing.empty()) continue;
        NIWitness w;
        w.first = inits[a];
        w.second = inits[b];
        w.first_constants = consts[a];
        w.second_constants = consts[b];
        w.variable = differing;
        w.first_out = runs[a].out.at(differing);
        w.second_out = runs[b].out.at(differing);
        cell.witness = std::move(w);
        cell.verdict = NIVerdict::Violation;
        return cell;
      }
    }
    cell.pairs_tested += hidden_count;  // identical pairs
  }
  if (inconclusive) {
    cell.verdict = NIVerdict::Inconclusive;
    cell.note = "FuelExhausted";
  }
  return cell;
}

std::vector<NICell> nitest_function(const System& sys, const FunctionTable& ft,
                                    const std::string& function, const NIConfig& cfg) {
  std::vector<PermSet> sets = cfg.caller_sets;
  if (sets.empty()) {
    for (std::size_t s = 0; s < (std::size_t{1} << sys.perm_count()); ++s) {
      sets.push_back(static_cast<PermSet>(s));
    }
  }
  std::vector<Level> observers = cfg.observers;
  if (observers.empty()) {
    for (std::size_t l = 0; l < sys.lattice.size(); ++l) observers.push_back(static_cast<Level>(l));
  }
  std::vector<NICell> out;
  for (PermSet p : sets) {
    for (Level l : observers) out.push_back(nitest_cell(sys, ft, function, p, l, cfg));
  }
  return out;
}

NIReport nitest_system(const System& sys, const FunctionTable& ft, const NIConfig& cfg) {
  NIReport report;
  for (const auto& f : sys.functions) {
    auto cells = nitest_function(sys, ft, f.qualified(), cfg);
    report.cells.insert(report.cells.end(), cells.begin(), cells.end());
  }
  return report;
}

}  // namespace permflow
