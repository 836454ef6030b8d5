#pragma once

#include <optional>
#include <tuple>

#include "lsp/expr.hpp"

namespace lsp {

struct Binding {
  int sym;
  bool hooked;
  Value value;
};

struct EvalEnv {
  const Structure* st = nullptr;
  const State* old = nullptr;  // null for unary evaluation
  const State* cur = nullptr;
  std::vector<Binding>* bound = nullptr;
};

Value eval(const ExprPtr& e, const EvalEnv& env);

// Truth of an assertion at a state (unary) or a pair of states (binary).
bool holds(const ExprPtr& e, const Structure& st, const State& cur);
bool holds(const ExprPtr& e, const Structure& st, const State& old, const State& cur);

struct Valuation {
  State old;
  State cur;
};

// Validity over all valuations of the free (hooked and unhooked) variables
// ranging over their carriers. Returns a falsifying valuation, if any.
// Throws ResourceError if the enumeration would exceed `limit` valuations.
std::optional<Valuation> find_counterexample(const ExprPtr& e, const Structure& st,
                                             std::size_t limit = std::size_t{1} << 26);
bool valid(const ExprPtr& e, const Structure& st);

// Enumerate every assignment of carrier values to `vars` on top of `base`.
// The callback returns false to stop.
template <typename F>
void for_each_assignment(const Structure& st, const std::vector<int>& vars, State base, F&& f) {
  std::vector<std::size_t> pos(vars.size(), 0);
  for (std::size_t i = 0; i < vars.size(); ++i) base[static_cast<std::size_t>(vars[i])] = st.var(vars[i]).sort->carrier[0];
  while (true) {
    if (!f(static_cast<const State&>(base))) return;
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      const auto& car = st.var(vars[i]).sort->carrier;
      if (++pos[i] < car.size()) {
        base[static_cast<std::size_t>(vars[i])] = car[pos[i]];
        break;
      }
      pos[i] = 0;
      base[static_cast<std::size_t>(vars[i])] = car[0];
    }
    if (i == vars.size()) return;
  }
}

// Number of assignments to `vars`, saturating at SIZE_MAX.
std::size_t assignment_count(const Structure& st, const std::vector<int>& vars);

}  // namespace lsp
