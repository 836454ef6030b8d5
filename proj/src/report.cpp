#include "lsp/report.hpp"

#include <functional>
#include <json.hpp>
#include <map>
#include <set>

namespace lsp {

using nlohmann::json;

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Valid: return kExitValid;
    case Verdict::Invalid: return kExitInvalid;
    case Verdict::ResourceExceeded: return kExitResource;
  }
  return kExitInput;
}

namespace {

std::string prog_text(const Prog& p, const Structure& st) {
  if (!p) return "<empty>";
  std::string s = to_string(p, st);
  std::string flat;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == ' ') {
      space = true;
      continue;
    }
    if (space && !flat.empty()) flat += ' ';
    space = false;
    flat += c;
  }
  return flat;
}

json state_json(const State& s, const std::vector<int>& vars, const Structure& st) {
  json out = json::object();
  for (int v : vars) out[st.var_name(v)] = s[static_cast<std::size_t>(v)].str();
  return out;
}

std::vector<int> shown_vars(const SpecifiedProgram& sp, const Structure& st) {
  std::set<int> vars;
  for (int v : spec_scope(sp.spec)) vars.insert(v);
  for (int v : free_vars(sp.program)) vars.insert(v);
  (void)st;
  return {vars.begin(), vars.end()};
}

std::string tuple_text(const std::vector<int>& vars, const Tuple& t, const Structure& st) {
  std::string out = "{";
  for (std::size_t i = 0; i < vars.size(); ++i) out += (i ? ", " : "") + st.var_name(vars[i]) + "=" + t[i].str();
  return out + "}";
}

json tuple_json(const std::vector<int>& vars, const Tuple& t, const Structure& st) {
  json out = json::object();
  for (std::size_t i = 0; i < vars.size(); ++i) out[st.var_name(vars[i])] = t[i].str();
  return out;
}

std::string sort_definition(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Bool: return "bool";
    case Sort::Kind::Range: return std::to_string(s.lo) + ".." + std::to_string(s.hi);
    case Sort::Kind::Enum: {
      std::string out = "enum {";
      for (std::size_t i = 0; i < s.literals.size(); ++i) out += (i ? ", " : "") + symbol_name(s.literals[i]);
      return out + "}";
    }
    case Sort::Kind::Seq: return "seq " + s.element->name + " max " + std::to_string(s.max_len);
    case Sort::Kind::Set: return "set " + s.element->name;
  }
  return "?";
}

bool anonymous(const Sort& s) { return s.name == sort_definition(s) || s.name == "bool"; }

void declare_sort(const SortPtr& s, std::set<std::string>& done, std::string& out) {
  if (done.count(s->name)) return;
  if (s->element) declare_sort(s->element, done, out);
  done.insert(s->name);
  if (anonymous(*s) && !s->strict) return;
  out += "sort " + s->name + " = " + sort_definition(*s) + (s->strict ? " strict" : "") + ";\n";
}

}  // namespace

std::string render_check_text(const CheckReport& r, const SpecifiedProgram& sp, const Structure& st) {
  std::string out = std::string("verdict: ") + verdict_name(r.verdict) + "\n";
  if (r.clause != Clause::None) out += std::string("clause: ") + clause_name(r.clause) + "\n";
  if (!r.detail.empty()) out += "detail: " + r.detail + "\n";
  out += "initial states: " + std::to_string(r.stats.initial_states) +
         ", configurations: " + std::to_string(r.stats.configurations) + ", edges: " + std::to_string(r.stats.edges) +
         "\n";
  for (const auto& n : r.notes) out += "note: " + n + "\n";
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    auto vars = shown_vars(sp, st);
    out += "counterexample (" + std::to_string(c.configs.size()) + " configurations):\n";
    for (std::size_t i = 0; i < c.configs.size(); ++i) {
      if (c.cycle_start && *c.cycle_start == i) out += "  -- cycle starts here\n";
      out += "  " + std::to_string(i) + ": " + st.show_state(c.configs[i].state, vars) + "  " +
             prog_text(c.configs[i].prog, st) + "\n";
      if (i < c.labels.size()) out += std::string("     --") + label_name(c.labels[i]) + "-->\n";
    }
  }
  return out;
}

std::string render_check_json(const CheckReport& r, const SpecifiedProgram& sp, const Structure& st) {
  json j;
  j["verdict"] = verdict_name(r.verdict);
  j["clause"] = clause_name(r.clause);
  j["detail"] = r.detail;
  j["stats"] = {{"initial_states", r.stats.initial_states},
                {"configurations", r.stats.configurations},
                {"edges", r.stats.edges}};
  j["notes"] = r.notes;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    auto vars = shown_vars(sp, st);
    json trace = json::array();
    for (const auto& cfg : c.configs)
      trace.push_back({{"program", cfg.prog ? json(prog_text(cfg.prog, st)) : json(nullptr)},
                       {"state", state_json(cfg.state, vars, st)}});
    json labels = json::array();
    for (auto l : c.labels) labels.push_back(label_name(l));
    j["counterexample"] = {{"length", c.configs.size()}, {"configurations", trace}, {"labels", labels}};
    if (c.cycle_start) j["counterexample"]["cycle_start"] = *c.cycle_start;
  } else {
    j["counterexample"] = nullptr;
  }
  return j.dump(2) + "\n";
}

Verdict proof_verdict(const ProofReport& r) {
  if (r.valid) return Verdict::Valid;
  return r.resource ? Verdict::ResourceExceeded : Verdict::Invalid;
}

std::string render_proof_text(const ProofReport& r) {
  std::string out = std::string("verdict: ") + verdict_name(proof_verdict(r)) + "\n";
  out += "depth: " + std::to_string(r.depth) + ", nodes: " + std::to_string(r.nodes) +
         ", obligations: " + std::to_string(r.obligations) + ", checked leaves: " + std::to_string(r.checked_leaves) +
         "\n";
  for (const auto& i : r.issues) out += "at " + i.where + ": " + i.message + "\n";
  return out;
}

std::string render_proof_json(const ProofReport& r) {
  json j;
  j["verdict"] = verdict_name(proof_verdict(r));
  j["depth"] = r.depth;
  j["nodes"] = r.nodes;
  j["obligations"] = r.obligations;
  j["checked_leaves"] = r.checked_leaves;
  json issues = json::array();
  for (const auto& i : r.issues) {
    json x = {{"where", i.where}, {"message", i.message}};
    if (i.obligation) x["formula"] = to_string(i.obligation->formula);
    issues.push_back(x);
  }
  j["issues"] = issues;
  return j.dump(2) + "\n";
}

std::string offset_summary(const StateRelation& r, const Structure& st) {
  if (r.pairs.empty()) return "false";
  std::set<std::vector<std::int64_t>> offsets;
  for (const auto& [a, b] : r.pairs) {
    std::vector<std::int64_t> d;
    for (std::size_t i = 0; i < r.vars.size(); ++i) {
      if (!a[i].is_int() || !b[i].is_int()) return "";
      d.push_back(b[i].as_int() - a[i].as_int());
    }
    offsets.insert(std::move(d));
  }
  std::string out;
  for (const auto& d : offsets) {
    if (!out.empty()) out += " or ";
    std::string conj;
    for (std::size_t i = 0; i < r.vars.size(); ++i) {
      const std::string& n = st.var_name(r.vars[i]);
      std::string eq = n + " = ~" + n;
      if (d[i] > 0) eq += " + " + std::to_string(d[i]);
      if (d[i] < 0) eq += " - " + std::to_string(-d[i]);
      conj += (conj.empty() ? "" : " and ") + eq;
    }
    out += offsets.size() > 1 && r.vars.size() > 1 ? "(" + conj + ")" : conj;
  }
  return out;
}

std::string render_relation_text(const StateRelation& r, const Structure& st) {
  std::string out = std::to_string(r.pairs.size()) + " pairs\n";
  for (const auto& [a, b] : r.pairs)
    out += "  " + tuple_text(r.vars, a, st) + " -> " + tuple_text(r.vars, b, st) + "\n";
  std::string sum = offset_summary(r, st);
  if (!sum.empty()) out += "as offsets: " + sum + "\n";
  return out;
}

std::string render_set_text(const StateSet& s, const Structure& st) {
  std::string out = std::to_string(s.states.size()) + " states\n";
  for (const auto& t : s.states) out += "  " + tuple_text(s.vars, t, st) + "\n";
  return out;
}

std::string render_relation_json(const StateRelation& r, const Structure& st) {
  json pairs = json::array();
  for (const auto& [a, b] : r.pairs) pairs.push_back({{"old", tuple_json(r.vars, a, st)}, {"new", tuple_json(r.vars, b, st)}});
  json j = {{"kind", "relation"}, {"size", r.pairs.size()}, {"pairs", pairs}};
  std::string sum = offset_summary(r, st);
  if (!sum.empty()) j["offsets"] = sum;
  return j.dump(2) + "\n";
}

std::string render_set_json(const StateSet& s, const Structure& st) {
  json states = json::array();
  for (const auto& t : s.states) states.push_back(tuple_json(s.vars, t, st));
  json j = {{"kind", "set"}, {"size", s.states.size()}, {"states", states}};
  return j.dump(2) + "\n";
}

std::string export_obligation(const Obligation& ob, const Structure& st) {
  std::string out = "// " + ob.origin + "\n";
  std::set<int> vars;
  for (auto [v, hooked] : occurrences(ob.formula)) vars.insert(v);
  std::set<std::string> done;
  std::string decls;
  for (int v : vars) declare_sort(st.var(v).sort, done, decls);
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
    for (const auto& b : e->binders)
      if (b.sort) declare_sort(b.sort, done, decls);
    if (e->op == Op::Lit && e->lit.is_enum())
      if (auto s = st.enum_sort_of(e->lit.as_enum())) declare_sort(s, done, decls);
    for (const auto& a : e->args) walk(a);
  };
  walk(ob.formula);
  for (int v : vars) decls += "var " + st.var_name(v) + " : " + st.var(v).sort->name + ";\n";
  out += decls;
  out += std::string("assert ") + (ob.kind == Obligation::Kind::WellFounded ? "wf " : "") + to_string(ob.formula) +
         ";\n";
  return out;
}

}  // namespace lsp
