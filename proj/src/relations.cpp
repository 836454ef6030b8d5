#include "lsp/relations.hpp"

#include <algorithm>
#include <map>

namespace lsp {

namespace {

std::vector<int> default_vars(const ExprPtr& a, std::vector<int> vars) {
  if (!vars.empty()) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (int v : free_vars(a))
      if (!std::binary_search(vars.begin(), vars.end(), v))
        throw InputError("assertion mentions a variable outside the projection: " + to_string(a));
    return vars;
  }
  auto f = free_vars(a);
  return {f.begin(), f.end()};
}

std::vector<State> all_states(const Structure& st, const std::vector<int>& vars, std::size_t limit) {
  if (assignment_count(st, vars) > limit) throw ResourceError("state space too large to materialise");
  std::vector<State> out;
  for_each_assignment(st, vars, st.default_state(), [&](const State& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

}  // namespace

Tuple project(const State& s, const std::vector<int>& vars) {
  Tuple t;
  t.reserve(vars.size());
  for (int v : vars) t.push_back(s[static_cast<std::size_t>(v)]);
  return t;
}

StateRelation materialize_relation(const ExprPtr& a, const Structure& st, std::vector<int> vars) {
  StateRelation r;
  r.vars = default_vars(a, std::move(vars));
  auto states = all_states(st, r.vars, std::size_t{1} << 13);
  for (const auto& s1 : states)
    for (const auto& s2 : states)
      if (holds(a, st, s1, s2)) r.pairs.insert({project(s1, r.vars), project(s2, r.vars)});
  return r;
}

StateSet materialize_set(const ExprPtr& a, const Structure& st, std::vector<int> vars) {
  StateSet r;
  r.vars = default_vars(a, std::move(vars));
  for (const auto& s : all_states(st, r.vars, std::size_t{1} << 22))
    if (holds(a, st, s)) r.states.insert(project(s, r.vars));
  return r;
}

ExprPtr to_assertion(const StateRelation& r) {
  auto t = std::make_shared<Table>();
  t->vars = r.vars;
  t->binary = true;
  for (const auto& [a, b] : r.pairs) {
    Tuple row = a;
    row.insert(row.end(), b.begin(), b.end());
    t->rows.insert(std::move(row));
  }
  return mk_table(t);
}

ExprPtr to_assertion(const StateSet& s) {
  auto t = std::make_shared<Table>();
  t->vars = s.vars;
  t->rows = s.states;
  return mk_table(t);
}

ExprPtr rel_compose(const ExprPtr& a, const ExprPtr& b) { return mk_compose({a, b}); }
ExprPtr trans_closure(const ExprPtr& a, bool reflexive) { return mk_closure(a, reflexive); }
ExprPtr preserve_under(const ExprPtr& a, const ExprPtr& b) { return mk_preserve(a, b); }

RelationClass classify_relation(const ExprPtr& a, const Structure& st, const std::vector<int>& respect_vars) {
  auto fv = free_vars(a);
  std::vector<int> vars(fv.begin(), fv.end());
  for (int v : respect_vars)
    if (!fv.count(v)) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  auto states = all_states(st, vars, std::size_t{1} << 13);
  const std::size_t n = states.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(words, 0));
  RelationClass c;
  c.reflexive = true;
  c.respects = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (holds(a, st, states[i], states[j])) {
        rows[i][j >> 6] |= std::uint64_t{1} << (j & 63);
        for (int v : respect_vars)
          if (!(states[i][static_cast<std::size_t>(v)] == states[j][static_cast<std::size_t>(v)])) c.respects = false;
      } else if (i == j) {
        c.reflexive = false;
      }
  c.transitive = true;
  for (std::size_t i = 0; i < n && c.transitive; ++i)
    for (std::size_t j = 0; j < n && c.transitive; ++j)
      if ((rows[i][j >> 6] >> (j & 63)) & 1u)
        for (std::size_t w = 0; w < words; ++w)
          if (rows[j][w] & ~rows[i][w]) {
            c.transitive = false;
            break;
          }
  return c;
}

bool well_founded(const StateRelation& r) {
  std::map<Tuple, std::size_t> ids;
  auto id = [&](const Tuple& t) { return ids.emplace(t, ids.size()).first->second; };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [a, b] : r.pairs) {
    std::size_t x = id(a);
    std::size_t y = id(b);
    edges.push_back({x, y});
  }
  // Kahn's algorithm: a relation is acyclic iff every node gets peeled.
  const std::size_t n = ids.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indeg(n, 0);
  for (auto [x, y] : edges) {
    succ[x].push_back(y);
    ++indeg[y];
  }
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (!indeg[i]) queue.push_back(i);
  std::size_t peeled = 0;
  while (!queue.empty()) {
    std::size_t x = queue.back();
    queue.pop_back();
    ++peeled;
    for (std::size_t y : succ[x])
      if (--indeg[y] == 0) queue.push_back(y);
  }
  return peeled == n;
}

bool well_founded(const ExprPtr& a, const Structure& st) { return well_founded(materialize_relation(a, st)); }

}  // namespace lsp
