// Independent reference implementations used to cross-check the library.
// Nothing here calls into lsp; inputs are plain integers.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Graph = std::set<std::pair<int, int>>;

// Follows every simple path from every node; a cycle exists iff some path
// reaches a node already on it.
inline bool has_cycle_all_paths(int n, const Graph& g) {
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  for (auto [a, b] : g) succ[static_cast<std::size_t>(a)].push_back(b);
  std::vector<char> on_path(static_cast<std::size_t>(n), 0);
  std::function<bool(int)> walk = [&](int u) {
    if (on_path[static_cast<std::size_t>(u)]) return true;
    on_path[static_cast<std::size_t>(u)] = 1;
    for (int v : succ[static_cast<std::size_t>(u)])
      if (walk(v)) return true;
    on_path[static_cast<std::size_t>(u)] = 0;
    return false;
  };
  for (int s = 0; s < n; ++s)
    if (walk(s)) return true;
  return false;
}

inline Graph compose(const Graph& a, const Graph& b) {
  Graph out;
  for (auto [x, y] : a)
    for (auto [y2, z] : b)
      if (y == y2) out.insert({x, z});
  return out;
}

// Least transitive superset by repeated composition until nothing changes.
inline Graph closure(Graph g) {
  while (true) {
    Graph next = g;
    for (const auto& p : compose(g, g)) next.insert(p);
    if (next == g) return g;
    g = std::move(next);
  }
}

// Least set containing `start` and closed under `step`.
inline std::set<int> preserve(const std::set<int>& start, const Graph& step) {
  std::set<int> out = start;
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto [a, b] : step)
      if (out.count(a) && out.insert(b).second) grew = true;
  }
  return out;
}

// Reachable internal transitions of `v := v + 1; v := v + 2` under a rely
// that lets the environment raise v anywhere within 0..hi, from every
// initial v in 0..hi, found by exhaustive search over (pc, v). Values the
// program computes beyond hi are kept; the environment cannot raise them
// further. Reflexive pairs are added for every reachable v.
inline std::set<std::pair<std::int64_t, std::int64_t>> counter_strongest_guar(std::int64_t hi) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  std::set<std::pair<int, std::int64_t>> seen;
  std::vector<std::pair<int, std::int64_t>> todo;
  for (std::int64_t v = 0; v <= hi; ++v) todo.push_back({0, v});
  while (!todo.empty()) {
    auto [pc, v] = todo.back();
    todo.pop_back();
    if (!seen.insert({pc, v}).second) continue;
    out.insert({v, v});
    for (std::int64_t w = v + 1; w <= hi; ++w) todo.push_back({pc, w});
    if (pc == 0) {
      out.insert({v, v + 1});
      todo.push_back({1, v + 1});
    } else if (pc == 1) {
      out.insert({v, v + 2});
      todo.push_back({2, v + 2});
    }
  }
  return out;
}

}  // namespace oracle
