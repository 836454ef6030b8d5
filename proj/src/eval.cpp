#include "lsp/eval.hpp"

#include <algorithm>
#include <limits>

namespace lsp {

using Bits = std::vector<std::uint64_t>;

namespace {

constexpr std::size_t kMaxUniverse = std::size_t{1} << 15;

bool test_bit(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1u; }
void set_bit(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

bool has_free_bound_refs(const ExprPtr& e, std::vector<std::pair<int, bool>>& scope) {
  if (e->op == Op::Var && e->var < 0) {
    for (const auto& b : scope)
      if (b.first == e->sym && b.second == e->hooked) return false;
    return true;
  }
  std::size_t mark = scope.size();
  for (const auto& b : e->binders) scope.push_back({b.sym, b.hooked});
  bool found = false;
  for (const auto& a : e->args)
    if (has_free_bound_refs(a, scope)) {
      found = true;
      break;
    }
  scope.resize(mark);
  return found;
}

}  // namespace

// Materialised view of a relational operator over the projection onto the
// free variables of its operands.
struct RelCache {
  const Structure* st = nullptr;
  std::vector<int> vars;
  std::vector<std::vector<Value>> domains;
  std::vector<std::size_t> stride;
  std::size_t size = 1;
  std::size_t words = 1;

  std::vector<Bits> rows_a, rows_b, rows_out;
  std::vector<char> has_a, has_b, has_out;
  Bits members;
  bool members_ready = false;

  void init(const Structure& s, std::vector<int> vs, std::vector<std::vector<Value>> doms) {
    st = &s;
    vars = std::move(vs);
    domains = std::move(doms);
    size = 1;
    stride.clear();
    for (const auto& d : domains) {
      stride.push_back(size);
      if (d.empty() || size > kMaxUniverse / d.size())
        throw ResourceError("relational operator universe too large");
      size *= d.size();
    }
    words = (size + 63) / 64;
    rows_a.assign(size, {});
    rows_b.assign(size, {});
    rows_out.assign(size, {});
    has_a.assign(size, 0);
    has_b.assign(size, 0);
    has_out.assign(size, 0);
  }

  std::optional<std::size_t> index_of(const State& s) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& d = domains[i];
      const Value& v = s[static_cast<std::size_t>(vars[i])];
      auto it = std::lower_bound(d.begin(), d.end(), v);
      if (it == d.end() || !(*it == v)) return std::nullopt;
      idx += stride[i] * static_cast<std::size_t>(it - d.begin());
    }
    return idx;
  }

  State decode(std::size_t idx) const {
    State s = st->default_state();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      s[static_cast<std::size_t>(vars[i])] = domains[i][(idx / stride[i]) % domains[i].size()];
    }
    return s;
  }

  Bits binary_row(const ExprPtr& rel, std::size_t i) const {
    Bits row(words, 0);
    State from = decode(i);
    std::vector<Binding> bound;
    for (std::size_t j = 0; j < size; ++j) {
      State to = decode(j);
      EvalEnv env{st, &from, &to, &bound};
      if (eval(rel, env).as_bool()) set_bit(row, j);
    }
    return row;
  }

  const Bits& row_a(const ExprPtr& rel, std::size_t i) {
    if (!has_a[i]) {
      rows_a[i] = binary_row(rel, i);
      has_a[i] = 1;
    }
    return rows_a[i];
  }

  const Bits& row_b(const ExprPtr& rel, std::size_t i) {
    if (!has_b[i]) {
      rows_b[i] = binary_row(rel, i);
      has_b[i] = 1;
    }
    return rows_b[i];
  }

  const Bits& compose_row(const ExprPtr& a, const ExprPtr& b, std::size_t i) {
    if (!has_out[i]) {
      Bits out(words, 0);
      Bits ra = row_a(a, i);
      for (std::size_t j = 0; j < size; ++j)
        if (test_bit(ra, j)) {
          const Bits& rb = row_b(b, j);
          for (std::size_t w = 0; w < words; ++w) out[w] |= rb[w];
        }
      rows_out[i] = std::move(out);
      has_out[i] = 1;
    }
    return rows_out[i];
  }

  const Bits& closure_row(const ExprPtr& a, bool reflexive, std::size_t i) {
    if (!has_out[i]) {
      Bits seen(words, 0);
      std::vector<std::size_t> stack;
      const Bits first = row_a(a, i);
      for (std::size_t j = 0; j < size; ++j)
        if (test_bit(first, j) && !test_bit(seen, j)) {
          set_bit(seen, j);
          stack.push_back(j);
        }
      while (!stack.empty()) {
        std::size_t j = stack.back();
        stack.pop_back();
        const Bits r = row_a(a, j);
        for (std::size_t k = 0; k < size; ++k)
          if (test_bit(r, k) && !test_bit(seen, k)) {
            set_bit(seen, k);
            stack.push_back(k);
          }
      }
      if (reflexive) set_bit(seen, i);
      rows_out[i] = std::move(seen);
      has_out[i] = 1;
    }
    return rows_out[i];
  }

  const Bits& preserve_set(const ExprPtr& a, const ExprPtr& b) {
    if (!members_ready) {
      members.assign(words, 0);
      std::vector<std::size_t> stack;
      std::vector<Binding> bound;
      for (std::size_t i = 0; i < size; ++i) {
        State s = decode(i);
        EvalEnv env{st, nullptr, &s, &bound};
        if (eval(a, env).as_bool()) {
          set_bit(members, i);
          stack.push_back(i);
        }
      }
      while (!stack.empty()) {
        std::size_t j = stack.back();
        stack.pop_back();
        const Bits r = row_b(b, j);
        for (std::size_t k = 0; k < size; ++k)
          if (test_bit(r, k) && !test_bit(members, k)) {
            set_bit(members, k);
            stack.push_back(k);
          }
      }
      members_ready = true;
    }
    return members;
  }
};

namespace {

std::vector<int> operand_vars(const ExprPtr& e) {
  std::set<int> vs;
  std::vector<std::pair<int, bool>> scope;
  for (const auto& a : e->args) {
    if (has_free_bound_refs(a, scope))
      throw InputError("relational operator applied to an open formula: " + to_string(e));
    auto f = free_vars(a);
    vs.insert(f.begin(), f.end());
  }
  return {vs.begin(), vs.end()};
}

std::vector<std::vector<Value>> carriers(const Structure& st, const std::vector<int>& vars) {
  std::vector<std::vector<Value>> out;
  for (int v : vars) out.push_back(st.var(v).sort->carrier);
  return out;
}

// Answers a relational query, using the cached universe when the query lies
// inside the carriers and a throwaway widened universe otherwise.
bool relational(const ExprPtr& e, const EvalEnv& env) {
  const Structure& st = *env.st;
  std::shared_ptr<RelCache> cache;
  {
    std::lock_guard<std::mutex> lock(e->cache_mu);
    if (!e->cache || e->cache->st != &st) {
      auto c = std::make_shared<RelCache>();
      auto vars = operand_vars(e);
      c->init(st, vars, carriers(st, vars));
      e->cache = c;
    }
    cache = e->cache;
  }
  const bool binary = e->op != Op::Preserve;
  if (binary && !env.old) throw EvalError("binary operator evaluated on a single state: " + to_string(e));

  auto run = [&](RelCache& c) -> std::optional<bool> {
    auto to = c.index_of(*env.cur);
    if (!to) return std::nullopt;
    if (e->op == Op::Preserve) return test_bit(c.preserve_set(e->args[0], e->args[1]), *to);
    auto from = c.index_of(*env.old);
    if (!from) return std::nullopt;
    if (e->op == Op::Compose) return test_bit(c.compose_row(e->args[0], e->args[1], *from), *to);
    return test_bit(c.closure_row(e->args[0], e->reflexive, *from), *to);
  };

  {
    std::lock_guard<std::mutex> lock(e->cache_mu);
    if (auto r = run(*cache)) return *r;
  }
  RelCache wide;
  auto doms = cache->domains;
  for (std::size_t i = 0; i < cache->vars.size(); ++i) {
    auto add = [&](const Value& v) {
      auto& d = doms[i];
      auto it = std::lower_bound(d.begin(), d.end(), v);
      if (it == d.end() || !(*it == v)) d.insert(it, v);
    };
    add((*env.cur)[static_cast<std::size_t>(cache->vars[i])]);
    if (env.old) add((*env.old)[static_cast<std::size_t>(cache->vars[i])]);
  }
  wide.init(st, cache->vars, std::move(doms));
  return *run(wide);
}

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow");
  return r;
}

std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow");
  return r;
}

std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer overflow");
  return r;
}

const Value& lookup(const ExprPtr& e, const EvalEnv& env) {
  if (e->var >= 0) {
    if (e->hooked) {
      if (!env.old) throw EvalError("hooked variable ~" + symbol_name(e->sym) + " in a unary context");
      return (*env.old)[static_cast<std::size_t>(e->var)];
    }
    return (*env.cur)[static_cast<std::size_t>(e->var)];
  }
  if (env.bound)
    for (auto it = env.bound->rbegin(); it != env.bound->rend(); ++it)
      if (it->sym == e->sym && it->hooked == e->hooked) return it->value;
  throw EvalError("unbound variable " + symbol_name(e->sym));
}

}  // namespace

Value eval(const ExprPtr& e, const EvalEnv& env) {
  auto arg = [&](std::size_t i) { return eval(e->args[i], env); };
  auto b = [&](std::size_t i) { return eval(e->args[i], env).as_bool(); };
  auto n = [&](std::size_t i) { return eval(e->args[i], env).as_int(); };
  switch (e->op) {
    case Op::Var: return lookup(e, env);
    case Op::Lit: return e->lit;
    case Op::Not: return Value::boolean(!b(0));
    case Op::And:
      for (std::size_t i = 0; i < e->args.size(); ++i)
        if (!b(i)) return Value::boolean(false);
      return Value::boolean(true);
    case Op::Or:
      for (std::size_t i = 0; i < e->args.size(); ++i)
        if (b(i)) return Value::boolean(true);
      return Value::boolean(false);
    case Op::Implies: return Value::boolean(!b(0) || b(1));
    case Op::Iff: return Value::boolean(b(0) == b(1));
    case Op::Eq: return Value::boolean(arg(0) == arg(1));
    case Op::Ne: return Value::boolean(!(arg(0) == arg(1)));
    case Op::Lt: return Value::boolean(n(0) < n(1));
    case Op::Le: return Value::boolean(n(0) <= n(1));
    case Op::Gt: return Value::boolean(n(0) > n(1));
    case Op::Ge: return Value::boolean(n(0) >= n(1));
    case Op::Neg: return Value::integer(sub(0, n(0)));
    case Op::Add: {
      std::int64_t acc = 0;
      for (std::size_t i = 0; i < e->args.size(); ++i) acc = add(acc, n(i));
      return Value::integer(acc);
    }
    case Op::Sub: {
      Value l = arg(0);
      Value r = arg(1);
      if (l.is_set()) {
        std::vector<Value> out;
        std::set_difference(l.elems().begin(), l.elems().end(), r.elems().begin(), r.elems().end(),
                            std::back_inserter(out));
        return Value::set(std::move(out));
      }
      return Value::integer(sub(l.as_int(), r.as_int()));
    }
    case Op::Mul: {
      std::int64_t acc = 1;
      for (std::size_t i = 0; i < e->args.size(); ++i) acc = mul(acc, n(i));
      return Value::integer(acc);
    }
    case Op::Div:
    case Op::Mod: {
      std::int64_t l = n(0), r = n(1);
      if (r == 0) throw EvalError("division by zero");
      if (e->op == Op::Div) return Value::integer(l / r);
      std::int64_t m = l % r;
      if (m < 0) m += r < 0 ? -r : r;
      return Value::integer(m);
    }
    case Op::Card: return Value::integer(static_cast<std::int64_t>(arg(0).elems().size()));
    case Op::Len: {
      Value s = arg(0);
      if (!s.is_seq()) throw EvalError("len of a non-sequence");
      return Value::integer(static_cast<std::int64_t>(s.elems().size()));
    }
    case Op::Max:
    case Op::Min: {
      if (e->args.size() == 1) {
        Value s = arg(0);
        if (!s.is_set()) throw EvalError("max/min of a non-set");
        if (s.elems().empty()) throw EvalError("max/min of the empty set");
        return e->op == Op::Max ? s.elems().back() : s.elems().front();
      }
      std::int64_t best = n(0);
      for (std::size_t i = 1; i < e->args.size(); ++i)
        best = e->op == Op::Max ? std::max(best, n(i)) : std::min(best, n(i));
      return Value::integer(best);
    }
    case Op::Index: {
      Value s = arg(0);
      std::int64_t i = n(1);
      if (!s.is_seq()) throw EvalError("indexing a non-sequence");
      if (i < 1 || i > static_cast<std::int64_t>(s.elems().size()))
        throw EvalError("sequence index " + std::to_string(i) + " out of range in " + to_string(e));
      return s.elems()[static_cast<std::size_t>(i - 1)];
    }
    case Op::Concat: {
      Value l = arg(0);
      Value r = arg(1);
      if (!l.is_seq() || !r.is_seq()) throw EvalError("concatenation of non-sequences");
      auto out = l.elems();
      out.insert(out.end(), r.elems().begin(), r.elems().end());
      return Value::sequence(std::move(out));
    }
    case Op::Union:
    case Op::Inter:
    case Op::Diff: {
      Value l = arg(0);
      Value r = arg(1);
      if (!l.is_set() || !r.is_set()) throw EvalError("set operation on non-sets");
      std::vector<Value> out;
      const auto &a = l.elems(), &c = r.elems();
      if (e->op == Op::Union)
        std::set_union(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(out));
      else if (e->op == Op::Inter)
        std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(out));
      else
        std::set_difference(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(out));
      return Value::set(std::move(out));
    }
    case Op::In:
    case Op::NotIn: {
      Value x = arg(0);
      Value s = arg(1);
      if (!s.is_set()) throw EvalError("membership in a non-set");
      bool in = std::binary_search(s.elems().begin(), s.elems().end(), x);
      return Value::boolean(e->op == Op::In ? in : !in);
    }
    case Op::Subset: {
      Value l = arg(0);
      Value r = arg(1);
      if (!l.is_set() || !r.is_set()) throw EvalError("inclusion of non-sets");
      return Value::boolean(std::includes(r.elems().begin(), r.elems().end(), l.elems().begin(), l.elems().end()));
    }
    case Op::SeqLit:
    case Op::SetLit: {
      std::vector<Value> out;
      for (std::size_t i = 0; i < e->args.size(); ++i) out.push_back(arg(i));
      return e->op == Op::SeqLit ? Value::sequence(std::move(out)) : Value::set(std::move(out));
    }
    case Op::Forall:
    case Op::Exists: {
      std::vector<Binding> local;
      std::vector<Binding>& bound = env.bound ? *env.bound : local;
      EvalEnv inner = env;
      inner.bound = &bound;
      const bool want = e->op == Op::Exists;
      const std::size_t base = bound.size();
      for (const auto& bd : e->binders) bound.push_back({bd.sym, bd.hooked, bd.sort->carrier[0]});
      std::vector<std::size_t> pos(e->binders.size(), 0);
      bool result = !want;
      while (true) {
        bool v = eval(e->args[0], inner).as_bool();
        if (v == want) {
          result = want;
          break;
        }
        std::size_t i = 0;
        for (; i < e->binders.size(); ++i) {
          const auto& car = e->binders[i].sort->carrier;
          if (++pos[i] < car.size()) {
            bound[base + i].value = car[pos[i]];
            break;
          }
          pos[i] = 0;
          bound[base + i].value = car[0];
        }
        if (i == e->binders.size()) break;
      }
      bound.resize(base);
      return Value::boolean(result);
    }
    case Op::Compose:
    case Op::Closure:
    case Op::Preserve: return Value::boolean(relational(e, env));
    case Op::Hook: {
      if (!env.old) throw EvalError("hooked expression in a unary context");
      EvalEnv inner = env;
      inner.cur = env.old;
      return eval(e->args[0], inner);
    }
    case Op::Identity: throw EvalError("identity frame evaluated outside a specification scope");
    case Op::Table: {
      const Table& t = *e->table;
      std::vector<Value> row;
      if (t.binary) {
        if (!env.old) throw EvalError("binary table evaluated on a single state");
        for (int v : t.vars) row.push_back((*env.old)[static_cast<std::size_t>(v)]);
      }
      for (int v : t.vars) row.push_back((*env.cur)[static_cast<std::size_t>(v)]);
      return Value::boolean(t.rows.count(row) > 0);
    }
  }
  throw EvalError("unknown operator");
}

bool holds(const ExprPtr& e, const Structure& st, const State& cur) {
  std::vector<Binding> bound;
  EvalEnv env{&st, nullptr, &cur, &bound};
  return eval(e, env).as_bool();
}

bool holds(const ExprPtr& e, const Structure& st, const State& old, const State& cur) {
  std::vector<Binding> bound;
  EvalEnv env{&st, &old, &cur, &bound};
  return eval(e, env).as_bool();
}

std::size_t assignment_count(const Structure& st, const std::vector<int>& vars) {
  std::size_t n = 1;
  for (int v : vars) {
    std::size_t c = st.var(v).sort->carrier.size();
    if (n > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
    n *= c;
  }
  return n;
}

std::optional<Valuation> find_counterexample(const ExprPtr& e, const Structure& st, std::size_t limit) {
  std::vector<int> olds, curs;
  for (auto [v, h] : occurrences(e)) (h ? olds : curs).push_back(v);
  std::size_t total = assignment_count(st, olds);
  std::size_t second = assignment_count(st, curs);
  if (total != 0 && second > limit / total) throw ResourceError("too many valuations to enumerate: " + to_string(e));
  std::optional<Valuation> bad;
  State base = st.default_state();
  for_each_assignment(st, olds, base, [&](const State& old) {
    for_each_assignment(st, curs, base, [&](const State& cur) {
      if (!holds(e, st, old, cur)) bad = Valuation{old, cur};
      return !bad;
    });
    return !bad;
  });
  return bad;
}

bool valid(const ExprPtr& e, const Structure& st) { return !find_counterexample(e, st); }

}  // namespace lsp
