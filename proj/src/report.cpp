#include "permflow/report.hpp"

#include <algorithm>
#include <sstream>

namespace permflow {

namespace {

Json env_json(const std::map<std::string, std::int64_t>& env) {
  Json out = Json::object();
  for (const auto& [k, v] : env) out[k] = v;
  return out;
}

std::string env_text(const std::map<std::string, std::int64_t>& env) {
  std::string out;
  for (const auto& [k, v] : env) {
    if (!out.empty()) out += ", ";
    out += k + "=" + std::to_string(v);
  }
  return "[" + out + "]";
}

std::string unsat_text(const Unsat& u, const System& sys, const ConstraintSystem& cs) {
  std::string out = std::string("unsatisfiable at ") + to_string(u.stage) + ": " + u.reason;
  if (u.var && *u.var < cs.vars.size()) {
    const TypeVar& v = cs.vars[*u.var];
    out += " for " + v.function + "." + v.name;
  }
  if (u.refuted) out += "; " + format_constraint(*u.refuted, sys.lattice, sys.universe, &cs.vars);
  out += " (witness " + sys.universe.format(u.witness) + ")";
  return out;
}

}  // namespace

Json diagnostics_json(const InputError& err) {
  Json list = Json::array();
  for (const auto& d : err.diagnostics()) {
    list.push_back({{"kind", to_string(d.kind)},
                    {"line", d.span.line},
                    {"column", d.span.column},
                    {"message", d.message}});
  }
  return {{"status", "error"}, {"diagnostics", list}};
}

Json type_json(const BaseType& t, const System& sys) {
  Json table = Json::array();
  for (std::size_t s = 0; s < t.size(); ++s) {
    auto set = static_cast<PermSet>(s);
    table.push_back({{"perms", sys.universe.format(set)}, {"level", sys.lattice.name(t.at(set))}});
  }
  return {{"text", format_base_type(t, sys.lattice, sys.universe)}, {"table", table}};
}

Json function_type_json(const FunctionType& ft, const System& sys) {
  Json params = Json::array();
  for (const auto& p : ft.params) params.push_back(type_json(p, sys));
  return {{"text", format_function_type(ft, sys.lattice, sys.universe)},
          {"params", params},
          {"return", type_json(ft.ret, sys)}};
}

Json type_error_json(const TypeError& err, const System& sys) {
  Json out = {{"kind", to_string(err.kind)},
              {"function", err.function},
              {"line", err.span.line},
              {"column", err.span.column},
              {"message", err.message}};
  if (err.kind != TypeErrorKind::AnnotationMismatch) {
    out["lhs"] = format_base_type(err.lhs, sys.lattice, sys.universe);
    out["rhs"] = format_base_type(err.rhs, sys.lattice, sys.universe);
    out["trace"] = err.trace.format(sys.universe);
    out["witness"] = sys.universe.format(err.witness);
  }
  return out;
}

Json check_json(const CheckReport& report, const System& sys) {
  Json fns = Json::array();
  for (const auto& f : report.functions) {
    Json entry = {{"name", f.function}, {"verdict", f.error ? "rejected" : "accepted"}};
    if (f.type) entry["type"] = function_type_json(*f.type, sys);
    if (f.error) entry["error"] = type_error_json(*f.error, sys);
    fns.push_back(entry);
  }
  return {{"status", report.ok() ? "ok" : "type-error"}, {"functions", fns}};
}

Json infer_json(const InferReport& report, const System& sys) {
  const ConstraintSystem& cs = report.generated.system;
  Json fns = Json::array();
  for (const auto& f : report.functions) {
    Json entry = {{"name", f.function},
                  {"annotated", f.annotated},
                  {"constraints", f.constraint_count}};
    if (f.type) {
      Json ft = function_type_json(*f.type, sys);
      entry["params"] = ft["params"];
      entry["return"] = ft["return"];
      entry["text"] = ft["text"];
    }
    Json intervals = Json::array();
    for (const auto& iv : report.solution.intervals) {
      if (std::find(f.vars.begin(), f.vars.end(), iv.var) == f.vars.end()) continue;
      Json j = {{"var", cs.vars[iv.var].name}, {"guard", iv.guard.format(sys.universe)}};
      if (iv.lo) j["lo"] = format_base_type(*iv.lo, sys.lattice, sys.universe);
      if (iv.hi) j["hi"] = format_base_type(*iv.hi, sys.lattice, sys.universe);
      intervals.push_back(j);
    }
    entry["intervals"] = intervals;
    fns.push_back(entry);
  }
  Json out = {{"status", report.ok() ? "ok" : "unsat"},
              {"constraints", cs.constraints.size()},
              {"simple_constraints", report.solution.simple_count},
              {"saturated_constraints", report.solution.saturated_count},
              {"functions", fns}};
  if (!report.ok()) {
    const Unsat& u = *report.solution.unsat;
    Json core = Json::array();
    for (std::size_t i : u.core) {
      const Constraint& c = cs.constraints[i];
      core.push_back({{"function", c.function},
                      {"line", c.span.line},
                      {"column", c.span.column},
                      {"constraint", format_constraint(c, sys.lattice, sys.universe, &cs.vars)}});
    }
    out["unsat"] = {{"stage", to_string(u.stage)},
                    {"reason", u.reason},
                    {"witness", sys.universe.format(u.witness)},
                    {"blamed", report.blamed},
                    {"core", core}};
  }
  return out;
}

Json ni_json(const NIReport& report, const System& sys) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    Json j = {{"function", c.function},
              {"P", sys.universe.format(c.perms)},
              {"observer", sys.lattice.name(c.observer)},
              {"mode", c.strict ? "strict" : "function"},
              {"pairs_tested", c.pairs_tested},
              {"verdict", to_string(c.verdict)}};
    if (!c.note.empty()) j["note"] = c.note;
    if (c.witness) {
      const NIWitness& w = *c.witness;
      j["witness"] = {{"first", env_json(w.first)},
                      {"second", env_json(w.second)},
                      {"first_constants", env_json(w.first_constants)},
                      {"second_constants", env_json(w.second_constants)},
                      {"variable", w.variable},
                      {"first_out", w.first_out},
                      {"second_out", w.second_out}};
    }
    cells.push_back(j);
  }
  return {{"status", report.ok() ? "ok" : "violation"},
          {"violations", report.count(NIVerdict::Violation)},
          {"inconclusive", report.count(NIVerdict::Inconclusive)},
          {"cells", cells}};
}

std::string check_text(const CheckReport& report, const System& sys) {
  std::ostringstream out;
  for (const auto& f : report.functions) {
    if (f.error) {
      out << "rejected " << f.error->to_string(sys) << "\n";
    } else {
      out << "ok " << f.function << " : "
          << format_function_type(*f.type, sys.lattice, sys.universe) << "\n";
    }
  }
  return out.str();
}

std::string infer_text(const InferReport& report, const System& sys) {
  std::ostringstream out;
  if (!report.ok()) {
    const ConstraintSystem& cs = report.generated.system;
    out << unsat_text(*report.solution.unsat, sys, cs) << "\n";
    for (std::size_t i : report.solution.unsat->core) {
      const Constraint& c = cs.constraints[i];
      out << "  " << c.function << " " << c.span.to_string() << ": "
          << format_constraint(c, sys.lattice, sys.universe, &cs.vars) << "\n";
    }
    return out.str();
  }
  for (const auto& f : report.functions) {
    out << f.function << " : " << format_function_type(*f.type, sys.lattice, sys.universe)
        << (f.annotated ? "  (annotated)" : "") << "\n";
  }
  return out.str();
}

std::string ni_text(const NIReport& report, const System& sys) {
  std::ostringstream out;
  for (const auto& c : report.cells) {
    if (c.verdict == NIVerdict::Ok || c.verdict == NIVerdict::Skipped) continue;
    out << to_string(c.verdict) << " " << c.function << " P=" << sys.universe.format(c.perms)
        << " observer=" << sys.lattice.name(c.observer);
    if (!c.note.empty()) out << " (" << c.note << ")";
    if (c.witness) {
      const NIWitness& w = *c.witness;
      out << ": " << env_text(w.first) << env_text(w.first_constants) << " -> " << w.variable
          << "=" << w.first_out << " vs " << env_text(w.second) << env_text(w.second_constants)
          << " -> " << w.variable << "=" << w.second_out;
    }
    out << "\n";
  }
  out << report.cells.size() << " cells, " << report.count(NIVerdict::Violation)
      << " violations, " << report.count(NIVerdict::Inconclusive) << " inconclusive, "
      << report.count(NIVerdict::Skipped) << " skipped\n";
  return out.str();
}

}  // namespace permflow
