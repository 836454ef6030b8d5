#include "lsp/expr.hpp"

#include <algorithm>
#include <functional>

namespace lsp {

namespace {

std::size_t compute_hash(const Expr& e) {
  std::size_t h = static_cast<std::size_t>(e.op) + 1;
  hash_combine(h, std::hash<int>{}(e.sym));
  hash_combine(h, e.hooked ? 7 : 3);
  hash_combine(h, std::hash<int>{}(e.var));
  hash_combine(h, e.reflexive ? 11 : 5);
  hash_combine(h, e.lit.hash());
  for (const auto& a : e.args) hash_combine(h, a->hash);
  for (const auto& b : e.binders) {
    hash_combine(h, std::hash<int>{}(b.sym));
    hash_combine(h, b.hooked ? 13 : 17);
  }
  for (int f : e.frame) hash_combine(h, std::hash<int>{}(f));
  hash_combine(h, std::hash<const void*>{}(e.table.get()));
  return h;
}

ExprPtr finish(std::shared_ptr<Expr> e) {
  e->hash = compute_hash(*e);
  return e;
}

std::shared_ptr<Expr> blank(Op op) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  return e;
}

// Copy of `e` with new children.
ExprPtr rebuild(const Expr& e, std::vector<ExprPtr> args) {
  auto n = blank(e.op);
  n->sym = e.sym;
  n->hooked = e.hooked;
  n->var = e.var;
  n->reflexive = e.reflexive;
  n->lit = e.lit;
  n->args = std::move(args);
  n->binders = e.binders;
  n->frame = e.frame;
  n->frame_syms = e.frame_syms;
  n->table = e.table;
  return finish(n);
}

bool is_relational(Op op) {
  return op == Op::Compose || op == Op::Closure || op == Op::Preserve || op == Op::Table ||
         op == Op::Identity;
}

ExprPtr bind_occurrences(const ExprPtr& e, const Binder& b) {
  if (e->op == Op::Var) {
    if (e->var >= 0 && e->sym == b.sym && e->hooked == b.hooked) return mk_bound(e->sym, e->hooked);
    return e;
  }
  if (e->op == Op::Forall || e->op == Op::Exists) {
    for (const auto& inner : e->binders)
      if (inner.sym == b.sym && inner.hooked == b.hooked) return e;
  }
  if (is_relational(e->op) || e->op == Op::Hook) return e;
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  bool changed = false;
  for (const auto& a : e->args) {
    args.push_back(bind_occurrences(a, b));
    changed = changed || args.back() != a;
  }
  return changed ? rebuild(*e, std::move(args)) : e;
}

}  // namespace

ExprPtr mk_var(const Structure& st, int var, bool hooked) {
  auto e = blank(Op::Var);
  e->var = var;
  e->sym = st.var(var).symbol;
  e->hooked = hooked;
  return finish(e);
}

ExprPtr mk_bound(int sym, bool hooked) {
  auto e = blank(Op::Var);
  e->sym = sym;
  e->hooked = hooked;
  return finish(e);
}

ExprPtr mk_lit(Value v) {
  auto e = blank(Op::Lit);
  e->lit = std::move(v);
  return finish(e);
}

ExprPtr mk_true() {
  static const ExprPtr t = mk_lit(Value::boolean(true));
  return t;
}

ExprPtr mk_false() {
  static const ExprPtr f = mk_lit(Value::boolean(false));
  return f;
}

ExprPtr mk_int(std::int64_t n) { return mk_lit(Value::integer(n)); }

ExprPtr mk(Op op, std::vector<ExprPtr> args) {
  auto e = blank(op);
  e->args = std::move(args);
  return finish(e);
}

ExprPtr mk_not(ExprPtr a) { return mk(Op::Not, {std::move(a)}); }

ExprPtr mk_and(std::vector<ExprPtr> args) {
  if (args.empty()) return mk_true();
  if (args.size() == 1) return args.front();
  return mk(Op::And, std::move(args));
}

ExprPtr mk_or(std::vector<ExprPtr> args) {
  if (args.empty()) return mk_false();
  if (args.size() == 1) return args.front();
  return mk(Op::Or, std::move(args));
}

ExprPtr mk_implies(ExprPtr a, ExprPtr b) { return mk(Op::Implies, {std::move(a), std::move(b)}); }
ExprPtr mk_eq(ExprPtr a, ExprPtr b) { return mk(Op::Eq, {std::move(a), std::move(b)}); }

ExprPtr mk_quant(Op op, std::vector<Binder> binders, ExprPtr body) {
  for (const auto& b : binders) body = bind_occurrences(body, b);
  auto e = blank(op);
  e->binders = std::move(binders);
  e->args = {std::move(body)};
  return finish(e);
}

ExprPtr mk_compose(std::vector<ExprPtr> args) {
  if (args.empty()) throw InputError("empty composition");
  ExprPtr acc = args.front();
  for (std::size_t i = 1; i < args.size(); ++i) acc = mk(Op::Compose, {acc, args[i]});
  return acc;
}

ExprPtr mk_closure(ExprPtr a, bool reflexive) {
  auto e = blank(Op::Closure);
  e->reflexive = reflexive;
  e->args = {std::move(a)};
  return finish(e);
}

ExprPtr mk_preserve(ExprPtr a, ExprPtr b) { return mk(Op::Preserve, {std::move(a), std::move(b)}); }

ExprPtr mk_identity(const Structure& st, std::vector<int> frame) {
  std::sort(frame.begin(), frame.end());
  frame.erase(std::unique(frame.begin(), frame.end()), frame.end());
  auto e = blank(Op::Identity);
  for (int v : frame) e->frame_syms.push_back(st.var(v).symbol);
  e->frame = std::move(frame);
  return finish(e);
}

ExprPtr mk_hook(ExprPtr a) {
  if (a->op == Op::Hook) return a;
  return mk(Op::Hook, {std::move(a)});
}

ExprPtr mk_table(std::shared_ptr<const Table> t) {
  auto e = blank(Op::Table);
  e->table = std::move(t);
  return finish(e);
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->op != b->op || a->sym != b->sym || a->hooked != b->hooked ||
      a->var != b->var || a->reflexive != b->reflexive || !(a->lit == b->lit) ||
      a->args.size() != b->args.size() || !(a->binders == b->binders) || a->frame != b->frame ||
      a->table != b->table)
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace {

int precedence(const Expr& e) {
  switch (e.op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not: return 5;
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::In:
    case Op::NotIn:
    case Op::Subset: return 6;
    case Op::Add:
    case Op::Sub:
    case Op::Union:
    case Op::Diff:
    case Op::Concat: return 7;
    case Op::Mul:
    case Op::Div:
    case Op::Mod:
    case Op::Inter: return 8;
    case Op::Neg:
    case Op::Card: return 9;
    case Op::Index: return 10;
    case Op::Forall:
    case Op::Exists: return 0;
    case Op::Lit:
      if (e.lit.is_int() && e.lit.as_int() < 0) return 9;
      return 11;
    default: return 11;
  }
}

const char* infix(Op op) {
  switch (op) {
    case Op::Iff: return " <=> ";
    case Op::Implies: return " => ";
    case Op::Or: return " or ";
    case Op::And: return " and ";
    case Op::Eq: return " = ";
    case Op::Ne: return " != ";
    case Op::Lt: return " < ";
    case Op::Le: return " <= ";
    case Op::Gt: return " > ";
    case Op::Ge: return " >= ";
    case Op::In: return " in ";
    case Op::NotIn: return " notin ";
    case Op::Subset: return " subset ";
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Union: return " union ";
    case Op::Diff: return " \\ ";
    case Op::Concat: return " ++ ";
    case Op::Mul: return " * ";
    case Op::Div: return " / ";
    case Op::Mod: return " % ";
    case Op::Inter: return " inter ";
    default: return nullptr;
  }
}

std::string print(const ExprPtr& e);

// `tight` forces parentheses at equal precedence (right operand of a
// left-associative operator, either side of a non-associative one).
std::string child(const ExprPtr& c, int parent_prec, bool tight) {
  int p = precedence(*c);
  std::string s = print(c);
  if (p < parent_prec || (tight && p == parent_prec)) return "(" + s + ")";
  return s;
}

std::string print_binders(const std::vector<Binder>& bs) {
  std::string out;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (i) out += ", ";
    out += (bs[i].hooked ? "~" : "") + symbol_name(bs[i].sym);
    if (bs[i].sort) out += " : " + bs[i].sort->name;
  }
  return out;
}

std::string print_list(const std::vector<ExprPtr>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += print(xs[i]);
  }
  return out;
}

std::string print(const ExprPtr& e) {
  switch (e->op) {
    case Op::Var: return (e->hooked ? "~" : "") + symbol_name(e->sym);
    case Op::Lit: return e->lit.str();
    case Op::Not: return "not " + child(e->args[0], 5, false);
    case Op::Neg: return "-" + child(e->args[0], 9, true);
    case Op::Card: return "#" + child(e->args[0], 9, true);
    case Op::Len: return "len(" + print(e->args[0]) + ")";
    case Op::Max: return "max(" + print_list(e->args) + ")";
    case Op::Min: return "min(" + print_list(e->args) + ")";
    case Op::Index: return child(e->args[0], 10, false) + "[" + print(e->args[1]) + "]";
    case Op::SeqLit: return "[" + print_list(e->args) + "]";
    case Op::SetLit: return "{" + print_list(e->args) + "}";
    case Op::Forall:
    case Op::Exists:
      return std::string(e->op == Op::Forall ? "forall " : "exists ") + print_binders(e->binders) + " . " +
             print(e->args[0]);
    case Op::Compose: return "compose(" + print_list(e->args) + ")";
    case Op::Closure: return std::string(e->reflexive ? "rtc(" : "tc(") + print(e->args[0]) + ")";
    case Op::Preserve: return "pres(" + print_list(e->args) + ")";
    case Op::Hook: return "hook(" + print(e->args[0]) + ")";
    case Op::Identity: {
      if (e->frame.empty()) return "I";
      std::string out = "I{";
      for (std::size_t i = 0; i < e->frame.size(); ++i) {
        if (i) out += ", ";
        out += symbol_name(e->frame_syms[i]);
      }
      return out + "}";
    }
    case Op::Table: {
      // Not parseable; the full contents keep text-keyed caches exact.
      const Table& t = *e->table;
      std::string out = t.binary ? "<relation over" : "<set over";
      for (int v : t.vars) out += " #" + std::to_string(v);
      out += ":";
      for (const auto& row : t.rows) {
        out += " (";
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out += t.binary && i == t.vars.size() ? " -> " : ", ";
          out += row[i].str();
        }
        out += ")";
      }
      return out + ">";
    }
    default: break;
  }
  const char* op = infix(e->op);
  int p = precedence(*e);
  bool assoc = e->op == Op::And || e->op == Op::Or || e->op == Op::Add || e->op == Op::Mul ||
               e->op == Op::Union || e->op == Op::Inter || e->op == Op::Concat;
  bool chain = assoc || e->op == Op::Sub || e->op == Op::Diff || e->op == Op::Div || e->op == Op::Mod;
  std::string out;
  for (std::size_t i = 0; i < e->args.size(); ++i) {
    if (i) out += op;
    bool tight;
    if (e->op == Op::Implies) tight = i == 0;
    else if (chain) tight = i > 0 && !assoc;
    else tight = true;
    if (assoc && i > 0 && e->args[i]->op == e->op) tight = true;
    // Flat n-ary connectives: a nested one keeps its own parentheses.
    if ((e->op == Op::And || e->op == Op::Or) && e->args[i]->op == e->op) tight = true;
    out += child(e->args[i], p, tight);
  }
  return out;
}

}  // namespace

std::string to_string(const ExprPtr& e) { return print(e); }

std::set<std::pair<int, bool>> occurrences(const ExprPtr& e) {
  std::set<std::pair<int, bool>> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
    switch (x->op) {
      case Op::Var:
        if (x->var >= 0) out.insert({x->var, x->hooked});
        return;
      case Op::Identity: throw InputError("identity frame used outside a specification scope");
      case Op::Compose:
      case Op::Closure:
        for (int v : free_vars(x)) {
          out.insert({v, false});
          out.insert({v, true});
        }
        return;
      case Op::Preserve:
        for (int v : free_vars(x)) out.insert({v, false});
        return;
      case Op::Table:
        for (int v : x->table->vars) {
          out.insert({v, false});
          if (x->table->binary) out.insert({v, true});
        }
        return;
      case Op::Hook:
        for (auto [v, h] : occurrences(x->args[0])) out.insert({v, true});
        return;
      default:
        for (const auto& a : x->args) go(a);
    }
  };
  go(e);
  return out;
}

std::set<int> free_vars(const ExprPtr& e) {
  std::set<int> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
    if (x->op == Op::Var) {
      if (x->var >= 0) out.insert(x->var);
      return;
    }
    if (x->op == Op::Identity) throw InputError("identity frame used outside a specification scope");
    if (x->op == Op::Table) {
      out.insert(x->table->vars.begin(), x->table->vars.end());
      return;
    }
    for (const auto& a : x->args) go(a);
  };
  go(e);
  return out;
}

bool is_unary(const ExprPtr& e) {
  for (auto [v, h] : occurrences(e))
    if (h) return false;
  return true;
}

ExprPtr hook_expression(const ExprPtr& e) {
  switch (e->op) {
    case Op::Var:
      if (e->var < 0 || e->hooked) return e;
      {
        auto n = blank(Op::Var);
        n->var = e->var;
        n->sym = e->sym;
        n->hooked = true;
        return finish(n);
      }
    case Op::Lit: return e;
    case Op::Compose:
    case Op::Closure:
    case Op::Preserve:
    case Op::Table:
    case Op::Identity: return mk_hook(e);
    case Op::Hook: return e;
    default: {
      std::vector<ExprPtr> args;
      for (const auto& a : e->args) args.push_back(hook_expression(a));
      return rebuild(*e, std::move(args));
    }
  }
}

ExprPtr identity_frame(const Structure& st, const std::vector<int>& frame, const std::vector<int>& scope) {
  std::vector<int> vars(scope.begin(), scope.end());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::vector<ExprPtr> parts;
  for (int v : vars)
    if (std::find(frame.begin(), frame.end(), v) == frame.end())
      parts.push_back(mk_eq(mk_var(st, v, false), mk_var(st, v, true)));
  return mk_and(std::move(parts));
}

ExprPtr expand_identity(const Structure& st, const ExprPtr& e, const std::vector<int>& scope) {
  if (e->op == Op::Identity) return identity_frame(st, e->frame, scope);
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  bool changed = false;
  for (const auto& a : e->args) {
    args.push_back(expand_identity(st, a, scope));
    changed = changed || args.back() != a;
  }
  return changed ? rebuild(*e, std::move(args)) : e;
}

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
    if (x->op == Op::And)
      for (const auto& a : x->args) go(a);
    else
      out.push_back(x);
  };
  go(e);
  return out;
}

namespace {

ExprPtr normalize_and(const ExprPtr& e) {
  if (e->args.empty()) return e;
  if (e->op == Op::And) {
    std::vector<ExprPtr> parts;
    for (const auto& c : conjuncts(e)) parts.push_back(normalize_and(c));
    std::vector<ExprPtr> flat;
    for (const auto& p : parts)
      for (const auto& c : conjuncts(p)) flat.push_back(c);
    std::sort(flat.begin(), flat.end(), [](const ExprPtr& a, const ExprPtr& b) {
      if (a->hash != b->hash) return a->hash < b->hash;
      return to_string(a) < to_string(b);
    });
    flat.erase(std::unique(flat.begin(), flat.end(), [](const ExprPtr& a, const ExprPtr& b) { return equal(a, b); }),
               flat.end());
    return mk_and(std::move(flat));
  }
  std::vector<ExprPtr> args;
  for (const auto& a : e->args) args.push_back(normalize_and(a));
  return rebuild(*e, std::move(args));
}

}  // namespace

bool same_modulo_and(const ExprPtr& a, const ExprPtr& b) {
  if (equal(a, b)) return true;
  return equal(normalize_and(a), normalize_and(b));
}

ExprPtr substitute(const ExprPtr& e, int var, const ExprPtr& replacement) {
  if (e->op == Op::Var) return (e->var == var && !e->hooked) ? replacement : e;
  if (is_relational(e->op) || e->op == Op::Hook) {
    if (free_vars(e).count(var)) throw InputError("cannot substitute inside a relational operator");
    return e;
  }
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  for (const auto& a : e->args) args.push_back(substitute(a, var, replacement));
  return rebuild(*e, std::move(args));
}

namespace {

struct Typer {
  const Structure& st;
  std::vector<std::pair<std::pair<int, bool>, Type>> bound;

  [[noreturn]] void clash(const ExprPtr& e, const std::string& what) {
    throw InputError("type error in '" + to_string(e) + "': " + what);
  }

  Type need(const ExprPtr& e, Type::Kind k) {
    Type t = go(e);
    if (t.kind != k && t.kind != Type::Kind::Unknown) {
      Type want;
      want.kind = k;
      clash(e, "expected " + want.str() + ", got " + t.str());
    }
    return t;
  }

  static Type simple(Type::Kind k) {
    Type t;
    t.kind = k;
    return t;
  }

  static Type container(Type::Kind k, Type elem) {
    Type t;
    t.kind = k;
    t.elem = std::make_shared<Type>(std::move(elem));
    return t;
  }

  Type of_value(const Value& v) {
    switch (v.kind()) {
      case Value::Kind::Bool: return simple(Type::Kind::Bool);
      case Value::Kind::Int: return simple(Type::Kind::Int);
      case Value::Kind::Enum: {
        auto s = st.enum_sort_of(v.as_enum());
        return s ? Type::of(*s) : Type{};
      }
      case Value::Kind::Seq:
      case Value::Kind::Set: {
        Type el = v.elems().empty() ? Type{} : of_value(v.elems().front());
        return container(v.is_seq() ? Type::Kind::Seq : Type::Kind::Set, el);
      }
    }
    return {};
  }

  Type elem_of(const Type& t) { return t.elem ? *t.elem : Type{}; }

  Type go(const ExprPtr& e) {
    using K = Type::Kind;
    switch (e->op) {
      case Op::Var: {
        if (e->var >= 0) return Type::of(*st.var(e->var).sort);
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
          if (it->first.first == e->sym && it->first.second == e->hooked) return it->second;
        clash(e, "unbound variable " + symbol_name(e->sym));
      }
      case Op::Lit: return of_value(e->lit);
      case Op::Not:
        need(e->args[0], K::Bool);
        return simple(K::Bool);
      case Op::And:
      case Op::Or:
      case Op::Implies:
      case Op::Iff:
        for (const auto& a : e->args) need(a, K::Bool);
        return simple(K::Bool);
      case Op::Neg:
      case Op::Mul:
      case Op::Div:
      case Op::Mod:
        for (const auto& a : e->args) need(a, K::Int);
        return simple(K::Int);
      case Op::Add:
        for (const auto& a : e->args) need(a, K::Int);
        return simple(K::Int);
      case Op::Sub: {
        Type a = go(e->args[0]);
        Type b = go(e->args[1]);
        if (a.kind == K::Set || b.kind == K::Set) {
          if (!compatible(a, b)) clash(e, "set difference of " + a.str() + " and " + b.str());
          return a.kind == K::Set ? a : b;
        }
        if ((a.kind != K::Int && a.kind != K::Unknown) || (b.kind != K::Int && b.kind != K::Unknown))
          clash(e, "subtraction of " + a.str() + " and " + b.str());
        return simple(K::Int);
      }
      case Op::Eq:
      case Op::Ne: {
        Type a = go(e->args[0]);
        Type b = go(e->args[1]);
        if (!compatible(a, b)) clash(e, "comparing " + a.str() + " with " + b.str());
        return simple(K::Bool);
      }
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        need(e->args[0], K::Int);
        need(e->args[1], K::Int);
        return simple(K::Bool);
      case Op::Card: {
        Type t = go(e->args[0]);
        if (t.kind != K::Seq && t.kind != K::Set && t.kind != K::Unknown) clash(e, "cardinality of " + t.str());
        return simple(K::Int);
      }
      case Op::Len:
        need(e->args[0], K::Seq);
        return simple(K::Int);
      case Op::Max:
      case Op::Min:
        if (e->args.size() == 1) {
          Type t = need(e->args[0], K::Set);
          return elem_of(t).kind == K::Unknown ? simple(K::Int) : elem_of(t);
        }
        for (const auto& a : e->args) need(a, K::Int);
        return simple(K::Int);
      case Op::Index: {
        Type t = need(e->args[0], K::Seq);
        need(e->args[1], K::Int);
        return elem_of(t);
      }
      case Op::Concat: {
        Type a = need(e->args[0], K::Seq);
        Type b = need(e->args[1], K::Seq);
        if (!compatible(a, b)) clash(e, "concatenating " + a.str() + " and " + b.str());
        return a.elem ? a : b;
      }
      case Op::Union:
      case Op::Inter:
      case Op::Diff: {
        Type a = need(e->args[0], K::Set);
        Type b = need(e->args[1], K::Set);
        if (!compatible(a, b)) clash(e, "combining " + a.str() + " and " + b.str());
        return a.elem ? a : b;
      }
      case Op::In:
      case Op::NotIn: {
        Type x = go(e->args[0]);
        Type s = need(e->args[1], K::Set);
        if (!compatible(x, elem_of(s))) clash(e, "membership of " + x.str() + " in " + s.str());
        return simple(K::Bool);
      }
      case Op::Subset: {
        Type a = need(e->args[0], K::Set);
        Type b = need(e->args[1], K::Set);
        if (!compatible(a, b)) clash(e, "inclusion of " + a.str() + " in " + b.str());
        return simple(K::Bool);
      }
      case Op::SeqLit:
      case Op::SetLit: {
        Type el;
        for (const auto& a : e->args) {
          Type t = go(a);
          if (!compatible(el, t)) clash(e, "mixed element types");
          if (el.kind == K::Unknown) el = t;
        }
        return container(e->op == Op::SeqLit ? K::Seq : K::Set, el);
      }
      case Op::Forall:
      case Op::Exists: {
        for (const auto& b : e->binders) {
          if (!b.sort) clash(e, "binder without sort");
          bound.push_back({{b.sym, b.hooked}, Type::of(*b.sort)});
        }
        need(e->args[0], K::Bool);
        bound.resize(bound.size() - e->binders.size());
        return simple(K::Bool);
      }
      case Op::Compose:
      case Op::Closure:
      case Op::Preserve:
        for (const auto& a : e->args) need(a, K::Bool);
        return simple(K::Bool);
      case Op::Hook: return go(e->args[0]);
      case Op::Identity:
      case Op::Table: return simple(K::Bool);
    }
    return {};
  }
};

}  // namespace

Type type_of(const Structure& st, const ExprPtr& e) {
  Typer t{st, {}};
  return t.go(e);
}

}  // namespace lsp
