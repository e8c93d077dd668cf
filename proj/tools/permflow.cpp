// permflow: check, infer, run and noninterference-test permission-dependent
// security types.
//
// Exit codes: 0 success, 1 negative verdict (type error, unsat, violation,
// fuel exhausted), 2 usage, I/O or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "permflow/infer.hpp"
#include "permflow/interpreter.hpp"
#include "permflow/ni.hpp"
#include "permflow/parser.hpp"
#include "permflow/printer.hpp"
#include "permflow/report.hpp"
#include "permflow/validate.hpp"

using namespace permflow;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct Options {
  std::string input;
  bool json = false;
  std::string entry;
  std::string args;
  std::optional<std::string> caller_perms;
  std::uint64_t fuel = kDefaultFuel;
  std::optional<std::string> observer;
  std::string domain = "0..2";
  std::uint64_t pair_cap = 1'000'000;
  std::string emit_annotated;
  std::vector<std::string> sets;
  bool strict = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::int64_t parse_int(const std::string& text) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + text + "'");
  }
  if (used != text.size()) throw UsageError("not an integer: '" + text + "'");
  return v;
}

std::vector<std::int64_t> parse_args(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_int(item));
  }
  return out;
}

void emit(const Options& o, const Json& j, const std::string& text) {
  if (o.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

System load(const Options& o) {
  System sys = parse_system(read_file(o.input));
  validate_system(sys);
  return sys;
}

int cmd_check(const Options& o) {
  System sys = load(o);
  CheckReport report = check_system(sys);
  emit(o, check_json(report, sys), check_text(report, sys));
  return report.ok() ? kOk : kNegative;
}

int cmd_infer(const Options& o) {
  System sys = load(o);
  InferReport report = infer_system(sys);
  if (report.ok() && !o.emit_annotated.empty()) {
    std::ofstream out(o.emit_annotated, std::ios::binary);
    if (!out) throw UsageError("cannot write " + o.emit_annotated);
    out << print_system(annotate_system(sys, report));
  }
  emit(o, infer_json(report, sys), infer_text(report, sys));
  return report.ok() ? kOk : kNegative;
}

int cmd_run(const Options& o) {
  System sys = load(o);
  const FunDecl* f = sys.find_function(o.entry);
  if (!f) throw UsageError("--entry: unknown function '" + o.entry + "'");
  PermSet perms = o.caller_perms ? sys.universe.parse_set(*o.caller_perms) : 0;
  std::vector<std::int64_t> args = parse_args(o.args);
  if (args.size() != f->params.size()) {
    throw UsageError(o.entry + " takes " + std::to_string(f->params.size()) + " arguments");
  }
  EvalEnv init;
  for (std::size_t i = 0; i < args.size(); ++i) init[f->params[i].name] = args[i];
  init[kReturnVar] = 0;
  std::map<std::string, std::int64_t> constants;
  for (const auto& s : o.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects name=value");
    std::string name = s.substr(0, eq);
    std::int64_t v = parse_int(s.substr(eq + 1));
    if (sys.find_constant(name)) {
      constants[name] = v;
    } else if (init.count(name)) {
      init[name] = v;
    } else {
      throw UsageError("--set: '" + name + "' is not a parameter, r or a constant");
    }
  }
  Json j = {{"entry", o.entry}, {"P", sys.universe.format(perms)}};
  try {
    EvalEnv out = replay(sys, o.entry, init, constants, perms, o.fuel);
    j["status"] = "ok";
    j["result"] = out.at(kReturnVar);
    emit(o, j, std::to_string(out.at(kReturnVar)) + "\n");
    return kOk;
  } catch (const FuelExhausted&) {
    j["status"] = "fuel-exhausted";
    emit(o, j, "FuelExhausted\n");
    return kNegative;
  }
}

int cmd_nitest(const Options& o) {
  System sys = load(o);
  FunctionTable ft;
  bool annotated = true;
  for (const auto& f : sys.functions) annotated = annotated && f.annotated();
  if (annotated) {
    ft = annotated_table(sys);
  } else {
    InferReport inferred = infer_system(sys);
    if (!inferred.ok()) {
      emit(o, infer_json(inferred, sys), infer_text(inferred, sys));
      return kNegative;
    }
    ft = inferred.table;
  }
  NIConfig cfg;
  cfg.fuel = o.fuel;
  cfg.pair_cap = o.pair_cap;
  cfg.strict = o.strict;
  auto dots = o.domain.find("..");
  if (dots == std::string::npos) throw UsageError("--domain expects lo..hi");
  cfg.domain_lo = parse_int(o.domain.substr(0, dots));
  cfg.domain_hi = parse_int(o.domain.substr(dots + 2));
  if (cfg.domain_hi <= cfg.domain_lo) throw UsageError("--domain needs at least two values");
  if (o.observer) cfg.observers = {sys.lattice.level(*o.observer)};
  if (o.caller_perms) cfg.caller_sets = {sys.universe.parse_set(*o.caller_perms)};
  NIReport report;
  if (o.entry.empty()) {
    report = nitest_system(sys, ft, cfg);
  } else {
    if (!sys.find_function(o.entry)) throw UsageError("--entry: unknown function '" + o.entry + "'");
    report.cells = nitest_function(sys, ft, o.entry, cfg);
  }
  emit(o, ni_json(report, sys), ni_text(report, sys));
  return report.ok() ? kOk : kNegative;
}

int cmd_fmt(const Options& o) {
  System sys = parse_system(read_file(o.input));
  std::cout << print_system(sys);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permflow: permission-dependent information flow types"};
  app.require_subcommand(1);
  Options o;

  auto input = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "system file")->required();
    sub->add_flag("--json", o.json, "emit one JSON document on stdout");
  };
  CLI::App* check = app.add_subcommand("check", "check a fully annotated system");
  input(check);
  CLI::App* infer = app.add_subcommand("infer", "infer types of unannotated functions");
  input(infer);
  infer->add_option("--emit-annotated", o.emit_annotated, "write the annotated system here");
  CLI::App* run = app.add_subcommand("run", "run one function");
  input(run);
  run->add_option("--entry", o.entry, "function to run, e.g. A.f")->required();
  run->add_option("--args", o.args, "comma separated arguments");
  run->add_option("--caller-perms", o.caller_perms, "caller permission set, e.g. p,q");
  run->add_option("--fuel", o.fuel, "step budget");
  run->add_option("--set", o.sets, "override r or a constant: name=value");
  CLI::App* nitest = app.add_subcommand("nitest", "brute-force noninterference test");
  input(nitest);
  nitest->add_option("--entry", o.entry, "test only this function");
  nitest->add_option("--caller-perms", o.caller_perms, "test only this caller set");
  nitest->add_option("--observer", o.observer, "test only this observer level");
  nitest->add_option("--domain", o.domain, "value range lo..hi");
  nitest->add_option("--pair-cap", o.pair_cap, "environment pairs per cell before giving up");
  nitest->add_option("--fuel", o.fuel, "step budget per run");
  nitest->add_flag("--strict", o.strict, "compare all observable variables for every caller set");
  CLI::App* fmt = app.add_subcommand("fmt", "pretty-print a system");
  fmt->add_option("input", o.input, "system file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(o);
    if (infer->parsed()) return cmd_infer(o);
    if (run->parsed()) return cmd_run(o);
    if (nitest->parsed()) return cmd_nitest(o);
    if (fmt->parsed()) return cmd_fmt(o);
  } catch (const InputError& e) {
    if (o.json) {
      std::cout << diagnostics_json(e).dump(2) << "\n";
    } else {
      for (const auto& d : e.diagnostics()) std::cerr << o.input << ":" << d.to_string() << "\n";
    }
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "permflow: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
