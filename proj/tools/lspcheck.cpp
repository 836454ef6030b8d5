// Command-line front end: model checking, proof checking, strongest
// relations, auxiliary erasure and configuration graphs.

#include <CLI11.hpp>
#include <json.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lsp/report.hpp"

using namespace lsp;

namespace {

struct Common {
  std::string file;
  std::size_t budget = 1000000;
  std::string format = "text";
};

bool json_out(const Common& c) { return c.format == "json"; }

Prog named_witness(const SourceFile& f, const std::string& name) {
  if (name.empty()) return f.witness;
  auto it = f.procs.find(name);
  if (it == f.procs.end()) throw InputError("no procedure named " + name + " for --witness");
  return it->second;
}

// Assertions of a file without a program, e.g. an exported obligation.
int check_assertions(const SourceFile& f, const Common& c) {
  bool ok = true;
  std::string text;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& a : f.assertions) {
    Obligation ob{a.wf ? Obligation::Kind::WellFounded : Obligation::Kind::Valid, a.formula, "assert"};
    Discharge d = discharge_obligation(ob, *f.st);
    if (d.resource) throw ResourceError(d.detail);
    ok = ok && d.ok;
    text += std::string(d.ok ? "holds: " : "fails: ") + to_string(a.formula) + (d.ok ? "" : "; " + d.detail) + "\n";
    results.push_back({{"formula", to_string(a.formula)}, {"holds", d.ok}, {"detail", d.detail}});
  }
  Verdict v = ok ? Verdict::Valid : Verdict::Invalid;
  if (json_out(c))
    std::cout << nlohmann::json{{"verdict", verdict_name(v)}, {"assertions", results}}.dump(2) << "\n";
  else
    std::cout << "verdict: " << verdict_name(v) << "\n" << text;
  return exit_code(v);
}

int cmd_check(const Common& c, const std::string& mode, const std::string& witness) {
  SourceFile f = parse_file(c.file);
  if (!f.program && !f.spec) return check_assertions(f, c);
  SpecifiedProgram sp = f.specified_program();
  if (mode == "lsps") sp.bracket = Bracket::Square;
  else if (mode == "lsp") sp.bracket = Bracket::Curly;
  Prog w = named_witness(f, witness);
  CheckOptions opts;
  opts.budget = c.budget;
  opts.invariant = f.invariant;
  CheckReport r = check_specified(sp, w ? &w : nullptr, *f.st, opts);
  std::cout << (json_out(c) ? render_check_json(r, sp, *f.st) : render_check_text(r, sp, *f.st));
  return exit_code(r.verdict);
}

int cmd_prove(const Common& c, bool basic, const std::string& export_dir) {
  SourceFile f = parse_file(c.file);
  if (!f.proof) throw InputError(c.file + ": no proof section");
  ProofOptions opts;
  opts.basic_only = basic;
  opts.budget = c.budget;
  ProofReport r = check_proof_tree(*f.proof, *f.st, opts);
  std::cout << (json_out(c) ? render_proof_json(r) : render_proof_text(r));
  if (!export_dir.empty()) {
    std::filesystem::create_directories(export_dir);
    std::size_t n = 0;
    for (const auto& i : r.issues) {
      if (!i.obligation) continue;
      auto path = std::filesystem::path(export_dir) / ("obligation_" + std::to_string(++n) + ".lsp");
      std::ofstream(path) << "// failed at " << i.where << "\n" << export_obligation(*i.obligation, *f.st);
      std::cerr << "wrote " << path.string() << "\n";
    }
  }
  return exit_code(proof_verdict(r));
}

int cmd_strongest(const Common& c, const std::string& what) {
  SourceFile f = parse_file(c.file);
  SpecifiedProgram sp = f.specified_program();
  Strongest s = strongest_relations(sp.program, sp.spec.glo, sp.spec.pre, sp.spec.rely, *f.st, c.budget);
  if (what == "wait")
    std::cout << (json_out(c) ? render_set_json(s.wait, *f.st) : render_set_text(s.wait, *f.st));
  else {
    const StateRelation& r = what == "eff" ? s.eff : s.guar;
    std::cout << (json_out(c) ? render_relation_json(r, *f.st) : render_relation_text(r, *f.st));
  }
  return kExitValid;
}

int cmd_erase(const Common& c, const std::vector<std::string>& aux_names) {
  SourceFile f = parse_file(c.file);
  std::vector<int> aux;
  for (const auto& n : aux_names) {
    auto id = f.st->find_var(n);
    if (!id) throw InputError("unknown variable " + n);
    aux.push_back(*id);
  }
  Prog augmented = f.witness ? f.witness : f.program;
  if (!augmented) throw InputError(c.file + ": nothing to erase");
  Prog plain = erase_auxiliary(augmented, aux);
  std::cout << to_string(plain, *f.st) << "\n";
  if (f.witness && f.program) {
    bool same = same_program(plain, f.program);
    std::cout << "// " << (same ? "matches" : "differs from") << " the program section\n";
    return same ? kExitValid : kExitInvalid;
  }
  return kExitValid;
}

int cmd_graph(const Common& c, std::size_t initial) {
  SourceFile f = parse_file(c.file);
  SpecifiedProgram sp = f.specified_program();
  Specification spec = expand_frames(sp.spec, *f.st);
  auto scope = spec_scope(spec);
  std::vector<State> starts;
  for_each_assignment(*f.st, scope, f.st->default_state(), [&](const State& s) {
    if (holds(spec.pre, *f.st, s)) starts.push_back(s);
    return starts.size() <= initial;
  });
  if (initial >= starts.size()) throw InputError("only " + std::to_string(starts.size()) + " initial states");
  Budget budget;
  budget.limit = c.budget;
  Interpreter interp(*f.st, &budget);
  Prog run = f.witness ? f.witness : sp.program;
  auto hid = hid_set(run);
  std::vector<int> candidates;
  for (int v : scope)
    if (!hid.count(v)) candidates.push_back(v);
  EnvModel env{spec.rely, env_mutable_vars(spec.rely, candidates)};
  ConfigGraph g = build_config_graph(run, starts[initial], env, interp, budget);
  std::cout << to_dot(g, *f.st, scope);
  return kExitValid;
}

int cmd_validate(const Common& c) {
  SourceFile f = parse_file(c.file);
  if (!f.program) throw InputError(c.file + ": no program section");
  auto v = validate_program(f.program, *f.st);
  for (const auto& x : v.violations) std::cout << x.loc.str() << ": " << x.constraint << ": " << x.message << "\n";
  for (const auto& n : v.notes) std::cout << "note: " << n << "\n";
  if (v.ok()) std::cout << "ok\n";
  return v.ok() ? kExitValid : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rely/guarantee checker for the shared-variable while language"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", common.file, "input file")->required()->check(CLI::ExistingFile);
    sub->add_option("--budget", common.budget, "configuration budget")->capture_default_str();
    sub->add_option("--format", common.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  };

  std::string mode = "auto", witness, what, export_dir;
  bool basic = false, emit = false;
  std::size_t initial = 0;
  std::vector<std::string> aux;

  auto* check = app.add_subcommand("check", "model check the specified program");
  add_common(check);
  check->add_option("--mode", mode, "auto, lsp or lsps")->check(CLI::IsMember({"auto", "lsp", "lsps"}));
  check->add_option("--witness", witness, "procedure to use as the augmented program");

  auto* prove = app.add_subcommand("prove", "check the proof tree");
  add_common(prove);
  prove->add_flag("--basic", basic, "restrict to basic rules (no introduction, no removals)");
  prove->add_option("--export-failed", export_dir, "directory for failed obligations");

  auto* strongest = app.add_subcommand("strongest", "print the strongest eff, wait or guar");
  add_common(strongest);
  strongest->add_option("--what", what, "eff, wait or guar")->required()->check(CLI::IsMember({"eff", "wait", "guar"}));

  auto* erase = app.add_subcommand("erase", "remove auxiliary variables");
  add_common(erase);
  erase->add_option("--aux", aux, "auxiliary variables")->required()->delimiter(',');

  auto* graph = app.add_subcommand("graph", "configuration graph for one initial state");
  add_common(graph);
  graph->add_flag("--emit", emit, "write Graphviz text to stdout");
  graph->add_option("--initial", initial, "index of the initial state");

  auto* validate = app.add_subcommand("validate", "check the program constraints");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (check->parsed()) return cmd_check(common, mode, witness);
    if (prove->parsed()) return cmd_prove(common, basic, export_dir);
    if (strongest->parsed()) return cmd_strongest(common, what);
    if (erase->parsed()) return cmd_erase(common, aux);
    if (graph->parsed()) return cmd_graph(common, initial);
    if (validate->parsed()) return cmd_validate(common);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  }
  return kExitInput;
}
