#include "lsp/program.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace lsp {

namespace {

std::size_t stmt_hash(const Stmt& s) {
  std::size_t h = static_cast<std::size_t>(s.kind) * 31 + 7;
  hash_combine(h, std::hash<int>{}(s.var));
  if (s.expr) hash_combine(h, s.expr->hash);
  for (int d : s.decls) hash_combine(h, std::hash<int>{}(d));
  hash_combine(h, s.first ? s.first->hash : 0x51);
  hash_combine(h, s.second ? s.second->hash : 0x73);
  return h;
}

Prog finish(std::shared_ptr<Stmt> s) {
  s->hash = stmt_hash(*s);
  return s;
}

std::shared_ptr<Stmt> blank(Stmt::Kind k, SourceLoc loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->loc = loc;
  return s;
}

void require(const Prog& p, const char* what) {
  if (!p) throw InputError(std::string("missing sub-program in ") + what);
}

}  // namespace

Prog mk_skip(SourceLoc loc) { return finish(blank(Stmt::Kind::Skip, loc)); }

Prog mk_assign(int var, ExprPtr rhs, SourceLoc loc) {
  auto s = blank(Stmt::Kind::Assign, loc);
  s->var = var;
  s->expr = std::move(rhs);
  return finish(s);
}

Prog mk_block(std::vector<int> decls, Prog body, SourceLoc loc) {
  require(body, "block");
  auto s = blank(Stmt::Kind::Block, loc);
  s->decls = std::move(decls);
  s->first = std::move(body);
  return finish(s);
}

Prog mk_seq(Prog a, Prog b, SourceLoc loc) {
  require(a, "sequence");
  require(b, "sequence");
  auto s = blank(Stmt::Kind::Seq, loc);
  s->first = std::move(a);
  s->second = std::move(b);
  return finish(s);
}

Prog mk_if(ExprPtr test, Prog then_branch, Prog else_branch, SourceLoc loc) {
  require(then_branch, "if");
  require(else_branch, "if");
  auto s = blank(Stmt::Kind::If, loc);
  s->expr = std::move(test);
  s->first = std::move(then_branch);
  s->second = std::move(else_branch);
  return finish(s);
}

Prog mk_while(ExprPtr test, Prog body, SourceLoc loc) {
  require(body, "while");
  auto s = blank(Stmt::Kind::While, loc);
  s->expr = std::move(test);
  s->first = std::move(body);
  return finish(s);
}

Prog mk_par(Prog a, Prog b, SourceLoc loc) {
  require(a, "parallel");
  require(b, "parallel");
  auto s = blank(Stmt::Kind::Par, loc);
  s->first = std::move(a);
  s->second = std::move(b);
  return finish(s);
}

Prog mk_await(ExprPtr test, Prog body, SourceLoc loc) {
  require(body, "await");
  auto s = blank(Stmt::Kind::Await, loc);
  s->expr = std::move(test);
  s->first = std::move(body);
  return finish(s);
}

Prog mk_seq_list(const std::vector<Prog>& parts) {
  if (parts.empty()) throw InputError("empty statement list");
  Prog acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = mk_seq(parts[i], acc, parts[i]->loc);
  return acc;
}

bool same_program(const Prog& a, const Prog& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->var != b->var || a->decls != b->decls) return false;
  if ((a->expr == nullptr) != (b->expr == nullptr)) return false;
  if (a->expr && !equal(a->expr, b->expr)) return false;
  return same_program(a->first, b->first) && same_program(a->second, b->second);
}

namespace {

void print_prog(const Prog& p, const Structure& st, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (!p) {
    out += pad + "<empty>";
    return;
  }
  switch (p->kind) {
    case Stmt::Kind::Skip: out += pad + "skip"; return;
    case Stmt::Kind::Assign: out += pad + st.var_name(p->var) + " := " + to_string(p->expr); return;
    case Stmt::Kind::Block: {
      out += pad + "begin loc ";
      for (std::size_t i = 0; i < p->decls.size(); ++i) out += (i ? ", " : "") + st.var_name(p->decls[i]);
      out += ";\n";
      print_prog(p->first, st, indent + 2, out);
      out += "\n" + pad + "end";
      return;
    }
    case Stmt::Kind::Seq:
      // Left-nested sequences keep their grouping through parentheses.
      if (p->first->kind == Stmt::Kind::Seq) {
        out += pad + "(\n";
        print_prog(p->first, st, indent + 2, out);
        out += "\n" + pad + ")";
      } else {
        print_prog(p->first, st, indent, out);
      }
      out += ";\n";
      print_prog(p->second, st, indent, out);
      return;
    case Stmt::Kind::If:
      out += pad + "if " + to_string(p->expr) + " then\n";
      print_prog(p->first, st, indent + 2, out);
      out += "\n" + pad + "else\n";
      print_prog(p->second, st, indent + 2, out);
      out += "\n" + pad + "fi";
      return;
    case Stmt::Kind::While:
      out += pad + "while " + to_string(p->expr) + " do\n";
      print_prog(p->first, st, indent + 2, out);
      out += "\n" + pad + "od";
      return;
    case Stmt::Kind::Par:
      out += pad + "par {\n";
      print_prog(p->first, st, indent + 2, out);
      out += "\n" + pad + "||\n";
      print_prog(p->second, st, indent + 2, out);
      out += "\n" + pad + "}";
      return;
    case Stmt::Kind::Await:
      out += pad + "await " + to_string(p->expr) + " do\n";
      print_prog(p->first, st, indent + 2, out);
      out += "\n" + pad + "od";
      return;
  }
}

void walk(const Prog& p, const std::function<void(const Stmt&)>& f) {
  if (!p) return;
  f(*p);
  walk(p->first, f);
  walk(p->second, f);
}

}  // namespace

std::string to_string(const Prog& p, const Structure& st, int indent) {
  std::string out;
  print_prog(p, st, indent, out);
  return out;
}

std::set<int> free_vars(const Prog& p) {
  std::set<int> out;
  walk(p, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::Assign) out.insert(s.var);
    if (s.expr) {
      auto f = free_vars(s.expr);
      out.insert(f.begin(), f.end());
    }
  });
  return out;
}

std::set<int> declared_vars(const Prog& p) {
  std::set<int> out;
  walk(p, [&](const Stmt& s) { out.insert(s.decls.begin(), s.decls.end()); });
  return out;
}

std::set<int> global_vars(const Prog& p) {
  auto all = free_vars(p);
  for (int d : declared_vars(p)) all.erase(d);
  return all;
}

std::set<int> hid_set(const Prog& p) {
  std::set<int> out = declared_vars(p);
  walk(p, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While) {
      auto f = free_vars(s.expr);
      out.insert(f.begin(), f.end());
    }
  });
  return out;
}

namespace {

struct Validator {
  const Structure& st;
  ValidationResult result;

  void add(const std::string& c, SourceLoc loc, std::string msg) {
    result.violations.push_back({c, loc, std::move(msg)});
  }

  bool known(const ExprPtr& e, SourceLoc loc) {
    bool ok = true;
    std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
      if (x->op == Op::Var) {
        if (x->var < 0 || static_cast<std::size_t>(x->var) >= st.var_count()) {
          add("unknown-variable", loc, "unknown variable " + symbol_name(x->sym));
          ok = false;
        }
        if (x->hooked) {
          add("sort", loc, "hooked variable in a program expression");
          ok = false;
        }
        return;
      }
      if (x->op != Op::Lit && x->args.empty() && x->op != Op::SeqLit && x->op != Op::SetLit) {
        add("sort", loc, "operator not allowed in a program expression: " + to_string(x));
        ok = false;
      }
      if (x->op == Op::Forall || x->op == Op::Exists || x->op == Op::Compose || x->op == Op::Closure ||
          x->op == Op::Preserve || x->op == Op::Hook) {
        add("sort", loc, "operator not allowed in a program expression: " + to_string(x));
        ok = false;
        return;
      }
      for (const auto& a : x->args) go(a);
    };
    go(e);
    return ok;
  }

  void sorts(const Prog& p) {
    walk(p, [&](const Stmt& s) {
      if (s.kind == Stmt::Kind::Assign && (s.var < 0 || static_cast<std::size_t>(s.var) >= st.var_count())) {
        add("unknown-variable", s.loc, "assignment to an unknown variable");
        return;
      }
      for (int d : s.decls)
        if (d < 0 || static_cast<std::size_t>(d) >= st.var_count())
          add("unknown-variable", s.loc, "declaration of an unknown variable");
      if (!s.expr || !known(s.expr, s.loc)) return;
      try {
        Type t = type_of(st, s.expr);
        if (s.kind == Stmt::Kind::Assign) {
          Type want = Type::of(*st.var(s.var).sort);
          if (!compatible(t, want))
            add("assignment-sort", s.loc,
                "assigning " + t.str() + " to " + st.var_name(s.var) + " of sort " + want.str());
        } else if (t.kind != Type::Kind::Bool && t.kind != Type::Kind::Unknown) {
          add("sort", s.loc, "test is not Boolean: " + to_string(s.expr));
        }
      } catch (const InputError& e) {
        add(s.kind == Stmt::Kind::Assign ? "assignment-sort" : "sort", s.loc, e.what());
      }
    });
  }

  // Each variable declared once; locals stay inside their block.
  void declarations(const Prog& p) {
    std::map<int, int> count;
    walk(p, [&](const Stmt& s) {
      for (int d : s.decls)
        if (++count[d] == 2)
          add("declaration", s.loc, "variable " + st.var_name(d) + " declared more than once");
    });
    std::function<void(const Prog&, std::set<int>&)> go = [&](const Prog& q, std::set<int>& in_scope) {
      if (!q) return;
      auto uses = [&](int v) {
        if (count.count(v) && !in_scope.count(v))
          add("declaration", q->loc, "local variable " + st.var_name(v) + " used outside its block");
      };
      if (q->kind == Stmt::Kind::Assign) uses(q->var);
      if (q->expr)
        for (int v : free_vars(q->expr)) uses(v);
      if (q->kind == Stmt::Kind::Block) {
        std::set<int> inner = in_scope;
        inner.insert(q->decls.begin(), q->decls.end());
        go(q->first, inner);
        return;
      }
      go(q->first, in_scope);
      go(q->second, in_scope);
    };
    std::set<int> none;
    go(p, none);
  }

  // Forward must-assign analysis. `locals` are the variables needing
  // initialisation; returns the set definitely assigned afterwards.
  std::set<int> init(const Prog& p, const std::set<int>& locals, std::set<int> assigned) {
    auto reads = [&](const ExprPtr& e) {
      for (int v : free_vars(e))
        if (locals.count(v) && !assigned.count(v))
          add("init-before-read", p->loc, "local variable " + st.var_name(v) + " read before initialisation");
    };
    switch (p->kind) {
      case Stmt::Kind::Skip: return assigned;
      case Stmt::Kind::Assign:
        reads(p->expr);
        assigned.insert(p->var);
        return assigned;
      case Stmt::Kind::Block: {
        std::set<int> inner = locals;
        inner.insert(p->decls.begin(), p->decls.end());
        for (int d : p->decls) assigned.erase(d);
        return init(p->first, inner, assigned);
      }
      case Stmt::Kind::Seq: return init(p->second, locals, init(p->first, locals, assigned));
      case Stmt::Kind::If: {
        reads(p->expr);
        auto a = init(p->first, locals, assigned);
        auto b = init(p->second, locals, assigned);
        std::set<int> both;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
        return both;
      }
      case Stmt::Kind::While:
        reads(p->expr);
        init(p->first, locals, assigned);
        return assigned;
      case Stmt::Kind::Par: {
        auto a = init(p->first, locals, assigned);
        auto b = init(p->second, locals, assigned);
        a.insert(b.begin(), b.end());
        return a;
      }
      case Stmt::Kind::Await:
        reads(p->expr);
        return init(p->first, locals, assigned);
    }
    return assigned;
  }

  void tests_in_arms(const Prog& p) {
    walk(p, [&](const Stmt& s) {
      if (s.kind != Stmt::Kind::Par) return;
      for (const Prog& arm : {s.first, s.second}) {
        auto own = declared_vars(arm);
        walk(arm, [&](const Stmt& t) {
          if (t.kind == Stmt::Kind::If || t.kind == Stmt::Kind::While)
            for (int v : free_vars(t.expr))
              if (!own.count(v))
                add("boolean-test", t.loc,
                    "test reads " + st.var_name(v) + ", which is not declared in its parallel arm");
          if (t.kind == Stmt::Kind::Await) {
            for (int v : free_vars(t.expr))
              if (!own.count(v)) {
                result.notes.push_back("await test at " + t.loc.str() + " reads shared variable " +
                                       st.var_name(v));
                break;
              }
          }
        });
      }
    });
  }
};

}  // namespace

ValidationResult validate_program(const Prog& p, const Structure& st) {
  Validator v{st, {}};
  if (!p) {
    v.add("sort", {}, "empty program");
    return v.result;
  }
  v.sorts(p);
  v.declarations(p);
  v.init(p, {}, {});
  v.tests_in_arms(p);
  std::sort(v.result.notes.begin(), v.result.notes.end());
  v.result.notes.erase(std::unique(v.result.notes.begin(), v.result.notes.end()), v.result.notes.end());
  return v.result;
}

namespace {

void flatten_seq(const Prog& p, std::vector<Prog>& out) {
  if (p->kind == Stmt::Kind::Seq) {
    flatten_seq(p->first, out);
    flatten_seq(p->second, out);
  } else {
    out.push_back(p);
  }
}

Prog normalize_seq(const Prog& p) {
  if (!p) return p;
  switch (p->kind) {
    case Stmt::Kind::Seq: {
      std::vector<Prog> parts;
      flatten_seq(p, parts);
      for (auto& q : parts) q = normalize_seq(q);
      return mk_seq_list(parts);
    }
    case Stmt::Kind::Block: return mk_block(p->decls, normalize_seq(p->first), p->loc);
    case Stmt::Kind::If: return mk_if(p->expr, normalize_seq(p->first), normalize_seq(p->second), p->loc);
    case Stmt::Kind::While: return mk_while(p->expr, normalize_seq(p->first), p->loc);
    case Stmt::Kind::Par: return mk_par(normalize_seq(p->first), normalize_seq(p->second), p->loc);
    case Stmt::Kind::Await: return mk_await(p->expr, normalize_seq(p->first), p->loc);
    default: return p;
  }
}

struct AuxUpdate {
  int var;
  ExprPtr rhs;
};

struct Stripper {
  const std::set<int>& aux;
  std::vector<AuxUpdate> updates;

  bool is_aux_assign(const Prog& p) const { return p->kind == Stmt::Kind::Assign && aux.count(p->var); }

  void distinct(const std::vector<Prog>& assigns, const Prog& where) {
    std::set<int> seen;
    for (const auto& a : assigns) {
      if (!seen.insert(a->var).second)
        throw InputError("auxiliary variable assigned twice in one wrapper at " + where->loc.str());
      updates.push_back({a->var, a->expr});
    }
  }

  Prog strip(const Prog& p) {
    switch (p->kind) {
      case Stmt::Kind::Skip: return p;
      case Stmt::Kind::Assign:
        if (aux.count(p->var))
          throw InputError("auxiliary assignment outside a wrapper at " + p->loc.str());
        return p;
      case Stmt::Kind::Block: return mk_block(p->decls, strip(p->first), p->loc);
      case Stmt::Kind::Seq: return mk_seq(strip(p->first), strip(p->second), p->loc);
      case Stmt::Kind::If: return mk_if(p->expr, strip(p->first), strip(p->second), p->loc);
      case Stmt::Kind::While: return mk_while(p->expr, strip(p->first), p->loc);
      case Stmt::Kind::Par: return mk_par(strip(p->first), strip(p->second), p->loc);
      case Stmt::Kind::Await: {
        std::vector<Prog> body;
        flatten_seq(p->first, body);
        const bool true_test = p->expr->op == Op::Lit && p->expr->lit == Value::boolean(true);
        // Assignment wrapper: await true do a1:=u1; ..; an:=un; v:=r od, n >= 1.
        if (true_test && body.size() >= 2 && body.back()->kind == Stmt::Kind::Assign &&
            !aux.count(body.back()->var) &&
            std::all_of(body.begin(), body.end() - 1, [&](const Prog& q) { return is_aux_assign(q); })) {
          distinct({body.begin(), body.end() - 1}, p);
          return body.back();
        }
        std::size_t keep = body.size();
        while (keep > 0 && is_aux_assign(body[keep - 1])) --keep;
        distinct({body.begin() + static_cast<std::ptrdiff_t>(keep), body.end()}, p);
        // An await body of auxiliary assignments only stands for skip.
        if (keep == 0) return mk_await(p->expr, mk_skip(p->loc), p->loc);
        std::vector<Prog> rest(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(keep));
        return mk_await(p->expr, strip(mk_seq_list(rest)), p->loc);
      }
    }
    return p;
  }
};

}  // namespace

Prog erase_auxiliary(const Prog& augmented, const std::vector<int>& aux) {
  std::set<int> alpha(aux.begin(), aux.end());
  Stripper s{alpha, {}};
  Prog plain = s.strip(augmented);
  for (int v : free_vars(plain))
    if (alpha.count(v)) throw InputError("an auxiliary variable remains in the algorithm after erasure");
  auto glo = global_vars(plain);
  for (const auto& u : s.updates)
    for (int v : free_vars(u.rhs))
      if (v != u.var && !glo.count(v))
        throw InputError("an auxiliary update reads a variable outside the globals and its own variable");
  return plain;
}

bool check_removal(const Prog& augmented, const std::vector<int>& glo, const std::vector<int>& aux,
                   const Prog& plain, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::set<int> theta(glo.begin(), glo.end());
  std::set<int> alpha(aux.begin(), aux.end());
  for (int a : alpha)
    if (theta.count(a)) return fail("global and auxiliary sets overlap");
  if (!augmented || !plain) return fail("empty program");
  auto plain_vars = free_vars(plain);
  for (int v : declared_vars(plain)) plain_vars.insert(v);
  auto plain_glo = global_vars(plain);
  for (int v : plain_vars) {
    if (alpha.count(v)) return fail("auxiliary variable occurs in the plain program");
    if (theta.count(v) != plain_glo.count(v)) return fail("global set does not match the plain program's globals");
  }
  Stripper s{alpha, {}};
  Prog stripped;
  try {
    stripped = s.strip(augmented);
  } catch (const InputError& e) {
    return fail(e.what());
  }
  for (const auto& u : s.updates)
    for (int v : free_vars(u.rhs))
      if (v != u.var && !theta.count(v)) return fail("auxiliary update reads a variable outside the globals");
  if (!same_program(normalize_seq(stripped), normalize_seq(plain)))
    return fail("augmented program does not reduce to the plain program");
  return true;
}

}  // namespace lsp
