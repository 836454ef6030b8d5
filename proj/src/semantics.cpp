#include "lsp/semantics.hpp"

#include <algorithm>
#include <deque>

#include "lsp/eval.hpp"

namespace lsp {

bool same_config(const Config& a, const Config& b) { return a.state == b.state && same_program(a.prog, b.prog); }

State Interpreter::assign(const State& s, int var, const Value& v) const {
  const Sort& sort = *st_.var(var).sort;
  if (sort.kind == Sort::Kind::Seq && v.is_seq() && v.elems().size() > sort.max_len)
    throw EvalError("sequence of length " + std::to_string(v.elems().size()) + " exceeds the bound of " +
                    st_.var_name(var));
  if (sort.strict && !sort.in_carrier(v))
    throw EvalError("value " + v.str() + " outside the carrier of " + st_.var_name(var));
  State out = s;
  out[static_cast<std::size_t>(var)] = v;
  return out;
}

std::vector<Config> Interpreter::internal_successors(const Config& c) {
  std::vector<Config> out;
  const Prog& z = c.prog;
  const State& s = c.state;
  if (!z) return out;
  auto test = [&](const ExprPtr& b) { return holds(b, st_, s); };
  switch (z->kind) {
    case Stmt::Kind::Skip: out.push_back({nullptr, s}); break;
    case Stmt::Kind::Assign: {
      std::vector<Binding> bound;
      EvalEnv env{&st_, nullptr, &s, &bound};
      out.push_back({nullptr, assign(s, z->var, eval(z->expr, env))});
      break;
    }
    case Stmt::Kind::Block: out.push_back({z->first, s}); break;
    case Stmt::Kind::Seq:
      for (auto& n : internal_successors(Config{z->first, s}))
        out.push_back({n.prog ? mk_seq(n.prog, z->second, z->loc) : z->second, std::move(n.state)});
      break;
    case Stmt::Kind::If: out.push_back({test(z->expr) ? z->first : z->second, s}); break;
    case Stmt::Kind::While:
      if (test(z->expr))
        out.push_back({mk_seq(z->first, z, z->loc), s});
      else
        out.push_back({nullptr, s});
      break;
    case Stmt::Kind::Par:
      for (auto& n : internal_successors(Config{z->first, s}))
        out.push_back({n.prog ? mk_par(n.prog, z->second, z->loc) : z->second, std::move(n.state)});
      for (auto& n : internal_successors(Config{z->second, s}))
        out.push_back({n.prog ? mk_par(z->first, n.prog, z->loc) : z->first, std::move(n.state)});
      break;
    case Stmt::Kind::Await: {
      if (!test(z->expr)) break;
      const AwaitOutcome& o = run_await(z, s);
      for (const auto& f : o.finals) out.push_back({nullptr, f});
      if (o.stuck) out.push_back({z, s});
      break;
    }
  }
  return out;
}

const Interpreter::AwaitOutcome& Interpreter::run_await(const Prog& await_stmt, const State& s) {
  Config key{await_stmt, s};
  auto it = await_memo_.find(key);
  if (it != await_memo_.end()) return it->second;

  // Environment-free exploration of the body.
  std::unordered_map<Config, std::uint32_t, ConfigHash, ConfigEq> ids;
  std::vector<Config> nodes;
  std::vector<std::vector<std::uint32_t>> succ;
  AwaitOutcome outcome;
  auto intern_node = [&](Config c) -> std::uint32_t {
    auto [pos, fresh] = ids.emplace(c, static_cast<std::uint32_t>(nodes.size()));
    if (fresh) {
      if (budget_) budget_->charge();
      nodes.push_back(std::move(c));
      succ.emplace_back();
    }
    return pos->second;
  };
  intern_node(Config{await_stmt->first, s});
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].prog) {
      outcome.finals.push_back(nodes[i].state);
      continue;
    }
    auto next = internal_successors(nodes[i]);
    if (next.empty()) outcome.stuck = true;
    for (auto& n : next) {
      std::uint32_t j = intern_node(std::move(n));
      succ[i].push_back(j);
    }
  }
  if (!outcome.stuck) {
    // Any cycle in the finite body graph is a diverging run.
    std::vector<std::uint8_t> color(nodes.size(), 0);
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    color[0] = 1;
    while (!stack.empty() && !outcome.stuck) {
      auto& [n, k] = stack.back();
      if (k < succ[n].size()) {
        std::uint32_t m = succ[n][k++];
        if (color[m] == 1) outcome.stuck = true;
        else if (color[m] == 0) {
          color[m] = 1;
          stack.push_back({m, 0});
        }
      } else {
        color[n] = 2;
        stack.pop_back();
      }
    }
  }
  std::sort(outcome.finals.begin(), outcome.finals.end());
  outcome.finals.erase(std::unique(outcome.finals.begin(), outcome.finals.end()), outcome.finals.end());
  return await_memo_.emplace(std::move(key), std::move(outcome)).first->second;
}

std::vector<int> env_mutable_vars(const ExprPtr& rely, const std::vector<int>& candidates) {
  std::set<int> pinned;
  for (const auto& c : conjuncts(rely)) {
    if (c->op != Op::Eq) continue;
    const auto& a = c->args[0];
    const auto& b = c->args[1];
    if (a->op == Op::Var && b->op == Op::Var && a->var >= 0 && a->var == b->var && a->hooked != b->hooked)
      pinned.insert(a->var);
  }
  std::vector<int> out;
  for (int v : candidates)
    if (!pinned.count(v)) out.push_back(v);
  return out;
}

std::vector<State> external_successors(const State& s, const EnvModel& env, const Structure& st) {
  std::vector<State> out;
  const auto& vars = env.mutable_vars;
  if (vars.empty()) return out;
  std::vector<std::vector<Value>> domains;
  for (int v : vars) {
    auto d = st.var(v).sort->carrier;
    const Value& now = s[static_cast<std::size_t>(v)];
    if (!std::binary_search(d.begin(), d.end(), now)) d.insert(std::lower_bound(d.begin(), d.end(), now), now);
    domains.push_back(std::move(d));
  }
  std::vector<std::size_t> pos(vars.size(), 0);
  State next = s;
  for (std::size_t i = 0; i < vars.size(); ++i) next[static_cast<std::size_t>(vars[i])] = domains[i][0];
  while (true) {
    if (!(next == s) && holds(env.rely, st, s, next)) out.push_back(next);
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++pos[i] < domains[i].size()) {
        next[static_cast<std::size_t>(vars[i])] = domains[i][pos[i]];
        break;
      }
      pos[i] = 0;
      next[static_cast<std::size_t>(vars[i])] = domains[i][0];
    }
    if (i == vars.size()) break;
  }
  return out;
}

bool ConfigGraph::blocked(std::uint32_t n) const {
  if (!nodes[n].prog) return false;
  for (auto e : out[n])
    if (edges[e].label == Label::Internal) return false;
  return true;
}

std::vector<std::uint32_t> ConfigGraph::path_to(std::uint32_t n) const {
  std::vector<std::uint32_t> path;
  while (parent[n] >= 0) {
    auto e = static_cast<std::uint32_t>(parent[n]);
    path.push_back(e);
    n = edges[e].from;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

ConfigGraph build_config_graph(const Prog& z, const State& s0, const EnvModel& env, Interpreter& interp,
                               Budget& budget) {
  ConfigGraph g;
  std::unordered_map<Config, std::uint32_t, ConfigHash, ConfigEq> ids;
  auto node = [&](Config c, std::int64_t via) -> std::uint32_t {
    auto [pos, fresh] = ids.emplace(c, static_cast<std::uint32_t>(g.nodes.size()));
    if (fresh) {
      budget.charge();
      g.nodes.push_back(std::move(c));
      g.out.emplace_back();
      g.parent.push_back(via);
    }
    return pos->second;
  };
  auto link = [&](std::uint32_t from, Config to, Label l) {
    auto e = static_cast<std::int64_t>(g.edges.size());
    std::uint32_t t = node(std::move(to), e);
    g.edges.push_back({from, t, l});
    g.out[from].push_back(static_cast<std::uint32_t>(e));
  };
  node(Config{z, s0}, -1);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    const Config c = g.nodes[i];
    std::vector<Config> next;
    std::vector<State> moved;
    try {
      next = interp.internal_successors(c);
      moved = external_successors(c.state, env, interp.structure());
    } catch (const EvalError& e) {
      g.error_node = i;
      g.error_message = e.what();
      break;
    }
    for (auto& n : next) link(i, std::move(n), Label::Internal);
    for (auto& s : moved) link(i, Config{c.prog, std::move(s)}, Label::External);
  }
  return g;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\l";
      continue;
    }
    out += ch;
  }
  return out;
}

}  // namespace

std::string to_dot(const ConfigGraph& g, const Structure& st, const std::vector<int>& vars) {
  std::string out = "digraph configurations {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& c = g.nodes[i];
    std::string prog = c.prog ? to_string(c.prog, st) : "<empty>";
    std::string attrs;
    if (!c.prog) attrs = ", peripheries=2";
    else if (g.blocked(static_cast<std::uint32_t>(i))) attrs = ", style=filled, fillcolor=lightgrey";
    out += "  n" + std::to_string(i) + " [label=\"" + escape(prog + "\n" + st.show_state(c.state, vars) + "\n") +
           "\"" + attrs + "];\n";
  }
  for (const auto& e : g.edges)
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" + label_name(e.label) +
           "\"" + (e.label == Label::External ? ", style=dashed" : "") + "];\n";
  return out + "}\n";
}

}  // namespace lsp
