#include "lsp/checker.hpp"

#include <algorithm>
#include <deque>

namespace lsp {

std::vector<int> spec_scope(const Specification& s) {
  std::vector<int> out = s.glo;
  out.insert(out.end(), s.aux.begin(), s.aux.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Specification expand_frames(const Specification& s, const Structure& st) {
  auto scope = spec_scope(s);
  Specification out = s;
  for (ExprPtr* f : {&out.pre, &out.rely, &out.wait, &out.guar, &out.eff})
    if (*f) *f = expand_identity(st, *f, scope);
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "valid";
    case Verdict::Invalid: return "invalid";
    case Verdict::ResourceExceeded: return "resource-exceeded";
  }
  return "?";
}

const char* clause_name(Clause c) {
  switch (c) {
    case Clause::None: return "none";
    case Clause::Convergence: return "convergence";
    case Clause::Guar: return "guar";
    case Clause::Wait: return "wait";
    case Clause::Eff: return "eff";
    case Clause::AuxRemoval: return "aux-removal";
    case Clause::LspsAwaitTermination: return "lsps-await-termination";
    case Clause::Invariant: return "invariant";
    case Clause::Evaluation: return "evaluation";
  }
  return "?";
}

void validate_specification(const Specification& s, const Structure& st, bool check_relations) {
  std::set<int> glo(s.glo.begin(), s.glo.end());
  for (int a : s.aux)
    if (glo.count(a)) throw InputError("variable " + st.var_name(a) + " is both global and auxiliary");
  auto scope = spec_scope(s);
  std::set<int> in_scope(scope.begin(), scope.end());
  const std::pair<const char*, const ExprPtr*> fields[] = {
      {"pre", &s.pre}, {"rely", &s.rely}, {"wait", &s.wait}, {"guar", &s.guar}, {"eff", &s.eff}};
  for (auto [name, f] : fields) {
    if (!*f) throw InputError(std::string("specification lacks a ") + name + " condition");
    Type t = type_of(st, *f);
    if (t.kind != Type::Kind::Bool && t.kind != Type::Kind::Unknown)
      throw InputError(std::string(name) + " condition is not Boolean");
    for (int v : free_vars(*f))
      if (!in_scope.count(v))
        throw InputError(std::string(name) + " condition mentions " + st.var_name(v) +
                         ", which is neither global nor auxiliary");
  }
  if (!is_unary(s.pre)) throw InputError("pre condition mentions hooked variables");
  if (!is_unary(s.wait)) throw InputError("wait condition mentions hooked variables");
  if (!check_relations) return;
  auto r = classify_relation(s.rely, st);
  if (!r.reflexive) throw InputError("rely condition is not reflexive: " + to_string(s.rely));
  if (!r.transitive) throw InputError("rely condition is not transitive: " + to_string(s.rely));
  if (!classify_relation(s.guar, st).reflexive)
    throw InputError("guar condition is not reflexive: " + to_string(s.guar));
}

void validate_specified_program(const SpecifiedProgram& sp, const Structure& st, bool check_relations) {
  if (!sp.program) throw InputError("specified program has no program");
  auto v = validate_program(sp.program, st);
  if (!v.ok()) {
    const auto& first = v.violations.front();
    throw InputError("program violates " + first.constraint + " at " + first.loc.str() + ": " + first.message);
  }
  auto scope = spec_scope(sp.spec);
  std::set<int> in_scope(scope.begin(), scope.end());
  for (int d : declared_vars(sp.program))
    if (in_scope.count(d)) throw InputError("local variable " + st.var_name(d) + " occurs in the specification sets");
  std::set<int> glo(sp.spec.glo.begin(), sp.spec.glo.end());
  for (int g : global_vars(sp.program))
    if (!glo.count(g)) throw InputError("global variable " + st.var_name(g) + " of the program is not in the global set");
  validate_specification(sp.spec, st, check_relations);
}

namespace {

Counterexample along(const ConfigGraph& g, const std::vector<std::uint32_t>& edge_path) {
  Counterexample c;
  c.configs.push_back(g.nodes[0]);
  for (auto e : edge_path) {
    c.configs.push_back(g.nodes[g.edges[e].to]);
    c.labels.push_back(g.edges[e].label);
  }
  return c;
}

// First internal edge lying on a cycle, if any.
std::optional<std::uint32_t> internal_cycle_edge(const ConfigGraph& g, std::vector<std::uint32_t>& comp) {
  const std::size_t n = g.nodes.size();
  std::vector<std::int64_t> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  comp.assign(n, 0);
  std::uint32_t next_index = 0, next_comp = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> work;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    work.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!work.empty()) {
      auto& [v, k] = work.back();
      if (k < g.out[v].size()) {
        std::uint32_t w = g.edges[g.out[v][k++]].to;
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          work.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        std::uint32_t done = v;
        if (low[done] == index[done]) {
          while (true) {
            std::uint32_t x = stack.back();
            stack.pop_back();
            on_stack[x] = 0;
            comp[x] = next_comp;
            if (x == done) break;
          }
          ++next_comp;
        }
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      }
    }
  }
  for (std::uint32_t e = 0; e < g.edges.size(); ++e)
    if (g.edges[e].label == Label::Internal && comp[g.edges[e].from] == comp[g.edges[e].to]) return e;
  return std::nullopt;
}

Counterexample cycle_witness(const ConfigGraph& g, std::uint32_t e, const std::vector<std::uint32_t>& comp) {
  auto path = g.path_to(g.edges[e].from);
  std::size_t start = path.size();
  path.push_back(e);
  const std::uint32_t from = g.edges[e].from;
  const std::uint32_t target = g.edges[e].to;
  if (target != from) {
    // Shortest way back inside the component.
    std::vector<std::int64_t> via(g.nodes.size(), -2);
    std::deque<std::uint32_t> q{target};
    via[target] = -1;
    while (!q.empty() && via[from] == -2) {
      std::uint32_t v = q.front();
      q.pop_front();
      for (auto k : g.out[v]) {
        std::uint32_t w = g.edges[k].to;
        if (comp[w] != comp[from] || via[w] != -2) continue;
        via[w] = k;
        q.push_back(w);
      }
    }
    std::vector<std::uint32_t> back;
    for (std::uint32_t v = from; v != target; v = g.edges[static_cast<std::uint32_t>(via[v])].from)
      back.push_back(static_cast<std::uint32_t>(via[v]));
    path.insert(path.end(), back.rbegin(), back.rend());
  }
  Counterexample c = along(g, path);
  c.cycle_start = start;
  return c;
}

enum class Mode { Lsp, Lsps };

struct Core {
  const Structure& st;
  const Specification& spec;
  const Prog& program;
  Mode mode;
  const CheckOptions& opts;
};

CheckReport run(const Core& core) {
  const Structure& st = core.st;
  const Specification& spec = core.spec;
  CheckReport report;
  Budget budget;
  budget.limit = core.opts.budget;
  Interpreter interp(st, &budget);
  auto scope = spec_scope(spec);
  auto hid = hid_set(core.program);
  std::vector<int> candidates;
  for (int v : scope)
    if (!hid.count(v)) candidates.push_back(v);
  EnvModel env{spec.rely, env_mutable_vars(spec.rely, candidates)};

  std::vector<State> initial;
  for_each_assignment(st, scope, st.default_state(), [&](const State& s) {
    if (holds(spec.pre, st, s)) initial.push_back(s);
    return true;
  });
  report.stats.initial_states = initial.size();

  auto fail = [&](Clause c, std::string detail, Counterexample cex) {
    report.verdict = Verdict::Invalid;
    report.clause = c;
    report.detail = std::move(detail);
    report.counterexample = std::move(cex);
    return report;
  };

  for (const State& s0 : initial) {
    ConfigGraph g;
    try {
      g = build_config_graph(core.program, s0, env, interp, budget);
    } catch (const ResourceError& e) {
      report.verdict = Verdict::ResourceExceeded;
      report.detail = e.what();
      report.stats.configurations = budget.used;
      return report;
    }
    report.stats.configurations += g.nodes.size();
    report.stats.edges += g.edges.size();
    if (g.error_node) {
      Counterexample cex = along(g, g.path_to(*g.error_node));
      return fail(Clause::Evaluation, "evaluation error: " + g.error_message, cex);
    }
    try {
      if (core.opts.invariant)
        for (std::uint32_t n = 0; n < g.nodes.size(); ++n)
          if (!holds(core.opts.invariant, st, g.nodes[n].state))
            return fail(Clause::Invariant, "invariant fails at " + st.show_state(g.nodes[n].state, scope),
                        along(g, g.path_to(n)));
      if (core.mode == Mode::Lsp) {
        std::vector<std::uint32_t> comp;
        if (auto e = internal_cycle_edge(g, comp))
          return fail(Clause::Convergence, "a cycle containing an internal step is reachable",
                      cycle_witness(g, *e, comp));
      }
      for (std::uint32_t k = 0; k < g.edges.size(); ++k) {
        const Edge& e = g.edges[k];
        if (e.label != Label::Internal) continue;
        const Config& from = g.nodes[e.from];
        const Config& to = g.nodes[e.to];
        auto path = g.path_to(e.from);
        path.push_back(k);
        if (core.mode == Mode::Lsps && same_program(from.prog, to.prog))
          return fail(Clause::LspsAwaitTermination, "an await body fails to terminate", along(g, path));
        if (!holds(spec.guar, st, from.state, to.state))
          return fail(Clause::Guar,
                      "internal step " + st.show_state(from.state, scope) + " -> " + st.show_state(to.state, scope) +
                          " violates the guar condition",
                      along(g, path));
      }
      for (std::uint32_t n = 0; n < g.nodes.size(); ++n)
        if (g.blocked(n) && !holds(spec.wait, st, g.nodes[n].state))
          return fail(Clause::Wait, "blocked in " + st.show_state(g.nodes[n].state, scope) + ", where wait fails",
                      along(g, g.path_to(n)));
      for (std::uint32_t n = 0; n < g.nodes.size(); ++n)
        if (g.terminal(n) && !holds(spec.eff, st, s0, g.nodes[n].state))
          return fail(Clause::Eff,
                      "terminates in " + st.show_state(g.nodes[n].state, scope) + " from " +
                          st.show_state(s0, scope) + ", where eff fails",
                      along(g, g.path_to(n)));
    } catch (const EvalError& e) {
      return fail(Clause::Evaluation, std::string("evaluation error in an assertion: ") + e.what(), along(g, {}));
    }
  }
  return report;
}

}  // namespace

CheckReport check_sat_noaux(const SpecifiedProgram& sp, const Structure& st, const CheckOptions& opts) {
  if (!sp.spec.aux.empty()) throw InputError("auxiliary variables need a witness program");
  Specification spec = expand_frames(sp.spec, st);
  SpecifiedProgram full{sp.program, spec, sp.bracket};
  validate_specified_program(full, st);
  return run(Core{st, spec, sp.program, Mode::Lsp, opts});
}

namespace {

CheckReport with_witness(const SpecifiedProgram& sp, const Prog& witness, const Structure& st,
                         const CheckOptions& opts, Mode mode) {
  Specification spec = expand_frames(sp.spec, st);
  validate_specified_program(SpecifiedProgram{sp.program, spec, sp.bracket}, st);
  std::string why;
  if (!check_removal(witness, spec.glo, spec.aux, sp.program, &why)) {
    CheckReport r;
    r.verdict = Verdict::Invalid;
    r.clause = Clause::AuxRemoval;
    r.detail = "witness is not an auxiliary augmentation of the program: " + why;
    return r;
  }
  auto v = validate_program(witness, st);
  if (!v.ok())
    throw InputError("witness violates " + v.violations.front().constraint + ": " + v.violations.front().message);
  return run(Core{st, spec, witness, mode, opts});
}

}  // namespace

CheckReport check_sat_general(const SpecifiedProgram& sp, const Prog& witness, const Structure& st,
                              const CheckOptions& opts) {
  return with_witness(sp, witness, st, opts, Mode::Lsp);
}

CheckReport check_sat_modified(const SpecifiedProgram& sp, const Prog* witness, const Structure& st,
                               const CheckOptions& opts) {
  if (witness) return with_witness(sp, *witness, st, opts, Mode::Lsps);
  if (!sp.spec.aux.empty()) throw InputError("auxiliary variables need a witness program");
  Specification spec = expand_frames(sp.spec, st);
  validate_specified_program(SpecifiedProgram{sp.program, spec, sp.bracket}, st);
  return run(Core{st, spec, sp.program, Mode::Lsps, opts});
}

CheckReport check_specified(const SpecifiedProgram& sp, const Prog* witness, const Structure& st,
                            const CheckOptions& opts) {
  if (sp.bracket == Bracket::Square) return check_sat_modified(sp, witness, st, opts);
  if (witness) return check_sat_general(sp, *witness, st, opts);
  return check_sat_noaux(sp, st, opts);
}

std::optional<std::string> replay(const Counterexample& cex, const SpecifiedProgram& sp, const Prog& run_program,
                                  const Structure& st) {
  if (cex.configs.empty()) return "empty counterexample";
  Specification spec = expand_frames(sp.spec, st);
  if (!same_program(cex.configs[0].prog, run_program)) return "does not start with the program";
  if (!holds(spec.pre, st, cex.configs[0].state)) return "initial state violates pre";
  Interpreter interp(st);
  Computation c{cex.configs, cex.labels};
  if (auto bad = illegal_step(c, interp, hid_set(run_program))) return bad;
  for (std::size_t k = 0; k < cex.labels.size(); ++k)
    if (cex.labels[k] == Label::External && !holds(spec.rely, st, cex.configs[k].state, cex.configs[k + 1].state))
      return "external step " + std::to_string(k) + " violates rely";
  if (cex.cycle_start && !same_config(cex.configs[*cex.cycle_start], cex.configs.back()))
    return "cycle does not close";
  return std::nullopt;
}

Strongest strongest_relations(const Prog& z, const std::vector<int>& glo, const ExprPtr& pre, const ExprPtr& rely,
                              const Structure& st, std::size_t budget_limit) {
  std::vector<int> vars = glo;
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  ExprPtr P = expand_identity(st, pre, vars);
  ExprPtr R = expand_identity(st, rely, vars);
  Strongest out;
  out.eff.vars = out.wait.vars = out.guar.vars = vars;
  Budget budget;
  budget.limit = budget_limit;
  Interpreter interp(st, &budget);
  auto hid = hid_set(z);
  std::vector<int> candidates;
  for (int v : vars)
    if (!hid.count(v)) candidates.push_back(v);
  EnvModel env{R, env_mutable_vars(R, candidates)};
  std::vector<State> initial;
  for_each_assignment(st, vars, st.default_state(), [&](const State& s) {
    if (holds(P, st, s)) initial.push_back(s);
    return true;
  });
  for (const State& s0 : initial) {
    ConfigGraph g = build_config_graph(z, s0, env, interp, budget);
    if (g.error_node) throw EvalError(g.error_message);
    const Tuple start = project(s0, vars);
    for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
      const Tuple here = project(g.nodes[n].state, vars);
      out.guar.pairs.insert({here, here});
      if (g.terminal(n)) out.eff.pairs.insert({start, here});
      if (g.blocked(n)) out.wait.states.insert(here);
    }
    for (const auto& e : g.edges)
      if (e.label == Label::Internal)
        out.guar.pairs.insert({project(g.nodes[e.from].state, vars), project(g.nodes[e.to].state, vars)});
  }
  return out;
}

}  // namespace lsp
