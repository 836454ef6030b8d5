#include "lsp/proof.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

namespace lsp {

namespace {

struct RuleInfo {
  Rule rule;
  const char* name;
};

constexpr RuleInfo kRules[] = {
    {Rule::Consequence, "consequence"},
    {Rule::Pre, "pre"},
    {Rule::Access, "access"},
    {Rule::Skip, "skip"},
    {Rule::Assignment, "assignment"},
    {Rule::Block, "block"},
    {Rule::Sequential, "sequential"},
    {Rule::If, "if"},
    {Rule::While, "while"},
    {Rule::Parallel, "parallel"},
    {Rule::ParallelGeneral, "parallel-general"},
    {Rule::Await, "await"},
    {Rule::Elimination, "elimination"},
    {Rule::Effect, "effect"},
    {Rule::Global, "global"},
    {Rule::Auxiliary, "auxiliary"},
    {Rule::Introduction, "introduction"},
    {Rule::LspsWhile, "lsps-while"},
    {Rule::LspsAwait, "lsps-await"},
    {Rule::Checked, "checked"},
};

// Thrown inside a rule check on the first schema mismatch.
struct SchemaError {
  std::string message;
};

[[noreturn]] void fail(const std::string& msg) { throw SchemaError{msg}; }

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

bool same(const ExprPtr& a, const ExprPtr& b) { return same_modulo_and(a, b); }

// Specified program with identity frames expanded over its own scope.
struct View {
  Prog z;
  std::set<int> glo, aux;
  std::vector<int> scope;
  ExprPtr P, R, W, G, E;
  Bracket bracket;
};

View view_of(const SpecifiedProgram& sp, const Structure& st) {
  auto s = expand_frames(sp.spec, st);
  return {sp.program, as_set(s.glo), as_set(s.aux), spec_scope(s), s.pre, s.rely, s.wait, s.guar, s.eff, sp.bracket};
}

class Matcher {
 public:
  Matcher(const ProofNode& node, const Structure& st) : node_(node), st_(st), c_(view_of(node.conclusion, st)) {
    for (const auto& p : node.premises) {
      if (!p) fail("missing premise");
      p_.push_back(view_of(p->conclusion, st));
    }
  }

  RuleCheck run() {
    RuleCheck out;
    try {
      check_bracket();
      dispatch();
      for (const auto& ob : obligations_) {
        std::set<int> scope(c_.scope.begin(), c_.scope.end());
        for (int v : free_vars(ob.formula))
          if (!scope.count(v))
            fail("obligation '" + ob.origin + "' mentions " + st_.var_name(v) + " outside the conclusion's variables");
      }
      out.obligations = std::move(obligations_);
      out.removal = std::move(removal_);
    } catch (const SchemaError& e) {
      out.ok = false;
      out.error = std::string(rule_name(node_.rule)) + " rule: " + e.message;
    } catch (const InputError& e) {
      out.ok = false;
      out.error = std::string(rule_name(node_.rule)) + " rule: " + e.what();
    }
    return out;
  }

 private:
  const ProofNode& node_;
  const Structure& st_;
  View c_;
  std::vector<View> p_;
  std::vector<Obligation> obligations_;
  std::optional<RemovalLeaf> removal_;

  std::string show(const ExprPtr& e) const { return to_string(e); }

  void premises(std::size_t n) {
    if (p_.size() != n)
      fail("expects " + std::to_string(n) + " premise" + (n == 1 ? "" : "s") + ", got " + std::to_string(p_.size()));
  }

  void field(const char* which, const ExprPtr& got, const ExprPtr& expected) {
    if (!same(got, expected))
      fail(std::string(which) + " is " + show(got) + ", expected the shape " + show(expected));
  }

  void oblige(ExprPtr formula, std::string origin, Obligation::Kind kind = Obligation::Kind::Valid) {
    obligations_.push_back({kind, std::move(formula), std::move(origin)});
  }

  void same_sets(const View& p, const char* which) {
    if (p.glo != c_.glo) fail(std::string(which) + " has a different global set");
    if (p.aux != c_.aux) fail(std::string(which) + " has a different auxiliary set");
  }

  void same_program_as(const View& p, const Prog& expected, const char* which) {
    if (!same_program(p.z, expected))
      fail(std::string(which) + " program is " + (p.z ? to_string(p.z, st_) : "<empty>") + ", expected " +
           to_string(expected, st_));
  }

  // Fields the rule copies unchanged from premise to conclusion.
  void keep(const View& p, const char* which, bool pre, bool rely, bool wait, bool guar, bool eff) {
    auto f = [&](bool on, const char* name, const ExprPtr& a, const ExprPtr& b) {
      if (on && !same(a, b))
        fail(std::string(which) + " " + name + " is " + show(a) + ", conclusion has " + show(b));
    };
    f(pre, "pre", p.P, c_.P);
    f(rely, "rely", p.R, c_.R);
    f(wait, "wait", p.W, c_.W);
    f(guar, "guar", p.G, c_.G);
    f(eff, "eff", p.E, c_.E);
  }

  void kind(Stmt::Kind k, const char* what) {
    if (!c_.z || c_.z->kind != k) fail(std::string("conclusion program is not ") + what);
  }

  ExprPtr unchanged(int v) const { return mk_eq(mk_var(st_, v, false), mk_var(st_, v, true)); }

  bool is_unchanged(const ExprPtr& e, int* var) const {
    if (e->op != Op::Eq) return false;
    const auto& a = e->args[0];
    const auto& b = e->args[1];
    if (a->op != Op::Var || b->op != Op::Var || a->var < 0 || a->var != b->var || a->hooked == b->hooked) return false;
    *var = a->var;
    return true;
  }

  // R|E|R, in either association. Returns E.
  ExprPtr middle_of(const ExprPtr& eff, const ExprPtr& rely) {
    if (eff->op == Op::Compose && eff->args.size() == 2) {
      const auto& l = eff->args[0];
      const auto& r = eff->args[1];
      if (l->op == Op::Compose && l->args.size() == 2 && same(l->args[0], rely) && same(r, rely)) return l->args[1];
      if (r->op == Op::Compose && r->args.size() == 2 && same(l, rely) && same(r->args[1], rely)) return r->args[0];
    }
    fail("eff is " + show(eff) + ", expected the shape R|E|R with R = " + show(rely));
  }

  // The a := u updates of assignment and await, one per auxiliary variable.
  ExprPtr aux_updates() {
    std::vector<ExprPtr> parts;
    std::set<int> seen;
    std::set<int> allowed = c_.glo;
    for (const auto& [a, u] : node_.aux_updates) {
      if (!c_.aux.count(a)) fail(st_.var_name(a) + " is updated but is not auxiliary");
      if (!seen.insert(a).second) fail(st_.var_name(a) + " is updated twice");
      if (!is_unary(u)) fail("update of " + st_.var_name(a) + " mentions hooked variables");
      for (int v : free_vars(u))
        if (!allowed.count(v) && v != a)
          fail("update of " + st_.var_name(a) + " reads " + st_.var_name(v) + ", which is neither global nor " +
               st_.var_name(a));
      if (!compatible(type_of(st_, u), Type::of(*st_.var(a).sort)))
        fail("update of " + st_.var_name(a) + " has the wrong sort");
    }
    for (int a : c_.aux) {
      ExprPtr u = mk_var(st_, a, false);
      for (const auto& [b, e] : node_.aux_updates)
        if (b == a) u = e;
      parts.push_back(mk_eq(mk_var(st_, a, false), hook_expression(u)));
    }
    return mk_and(std::move(parts));
  }

  void check_bracket() {
    const bool square = c_.bracket == Bracket::Square;
    switch (node_.rule) {
      case Rule::While:
      case Rule::Await:
        if (square) fail("square-bracket conclusions use the lsps variant");
        break;
      case Rule::LspsWhile:
      case Rule::LspsAwait:
        if (!square) fail("only applies to square-bracket conclusions");
        break;
      default: break;
    }
    const bool await_like = node_.rule == Rule::Await || node_.rule == Rule::LspsAwait;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      Bracket want = await_like ? Bracket::Curly : c_.bracket;
      if (p_[i].bracket != want)
        fail("premise " + std::to_string(i + 1) + " must use " + (want == Bracket::Curly ? "curly" : "square") +
             " brackets");
    }
  }

  void dispatch() {
    switch (node_.rule) {
      case Rule::Consequence: return consequence();
      case Rule::Pre: return pre();
      case Rule::Access: return access();
      case Rule::Skip: return skip();
      case Rule::Assignment: return assignment();
      case Rule::Block: return block();
      case Rule::Sequential: return sequential();
      case Rule::If: return if_rule();
      case Rule::While:
      case Rule::LspsWhile: return while_rule(node_.rule == Rule::While);
      case Rule::Parallel: return parallel();
      case Rule::ParallelGeneral: return parallel_general();
      case Rule::Await:
      case Rule::LspsAwait: return await_rule();
      case Rule::Elimination: return elimination();
      case Rule::Effect: return effect();
      case Rule::Global: return global();
      case Rule::Auxiliary: return auxiliary();
      case Rule::Introduction: return introduction();
      case Rule::Checked:
        if (!p_.empty()) fail("checked leaves have no premises");
        return;
    }
  }

  void consequence() {
    premises(1);
    const View& p = p_[0];
    same_sets(p, "premise");
    same_program_as(p, c_.z, "premise");
    oblige(mk_implies(c_.P, p.P), "consequence: conclusion pre implies premise pre");
    oblige(mk_implies(c_.R, p.R), "consequence: conclusion rely implies premise rely");
    oblige(mk_implies(p.W, c_.W), "consequence: premise wait implies conclusion wait");
    oblige(mk_implies(p.G, c_.G), "consequence: premise guar implies conclusion guar");
    oblige(mk_implies(p.E, c_.E), "consequence: premise eff implies conclusion eff");
  }

  void pre() {
    premises(1);
    const View& p = p_[0];
    same_sets(p, "premise");
    same_program_as(p, c_.z, "premise");
    keep(p, "premise", true, true, true, true, false);
    field("conclusion eff", c_.E, mk_and({hook_expression(p.P), p.E}));
  }

  void access() {
    premises(1);
    const View& p = p_[0];
    same_sets(p, "premise");
    same_program_as(p, c_.z, "premise");
    keep(p, "premise", true, false, true, true, true);
    int v = -1;
    if (node_.variable) {
      v = *node_.variable;
    } else {
      auto have = conjuncts(c_.R);
      for (const auto& k : conjuncts(p.R)) {
        int w;
        bool known = std::any_of(have.begin(), have.end(), [&](const ExprPtr& h) { return equal(h, k); });
        if (!known && is_unchanged(k, &w)) {
          if (v >= 0 && v != w) fail("premise rely adds more than one variable");
          v = w;
        }
      }
      if (v < 0) fail("premise rely does not add a conjunct v = ~v");
    }
    auto hid = hid_set(c_.z);
    if (!hid.count(v) || !c_.glo.count(v))
      fail(st_.var_name(v) + " is not a hidden global variable of the program");
    field("premise rely", p.R, mk_and({c_.R, unchanged(v)}));
  }

  void skip() {
    premises(0);
    kind(Stmt::Kind::Skip, "skip");
    field("eff", c_.E, c_.R);
  }

  void assignment() {
    premises(0);
    kind(Stmt::Kind::Assign, "an assignment");
    ExprPtr e = middle_of(c_.E, c_.R);
    int v = c_.z->var;
    std::vector<int> frame(c_.aux.begin(), c_.aux.end());
    frame.push_back(v);
    ExprPtr lhs = mk_and({mk_hook(mk_preserve(c_.P, c_.R)),
                          mk_eq(mk_var(st_, v, false), hook_expression(c_.z->expr)),
                          identity_frame(st_, frame, c_.scope), aux_updates()});
    oblige(mk_implies(lhs, mk_and({c_.G, e})), "assignment: the step satisfies guar and eff");
  }

  void block() {
    premises(1);
    kind(Stmt::Kind::Block, "a block");
    const View& p = p_[0];
    same_program_as(p, c_.z->first, "premise");
    if (p.aux != c_.aux) fail("premise has a different auxiliary set");
    std::set<int> expected = c_.glo;
    std::vector<ExprPtr> pinned{c_.R};
    for (int d : c_.z->decls) {
      if (c_.glo.count(d)) fail("local " + st_.var_name(d) + " is in the conclusion's global set");
      expected.insert(d);
      pinned.push_back(unchanged(d));
    }
    if (p.glo != expected) fail("premise global set must be the conclusion's plus the locals");
    keep(p, "premise", true, false, true, true, true);
    field("premise rely", p.R, mk_and(std::move(pinned)));
  }

  void sequential() {
    premises(2);
    kind(Stmt::Kind::Seq, "a sequential composition");
    const View& p1 = p_[0];
    const View& p2 = p_[1];
    same_sets(p1, "first premise");
    same_sets(p2, "second premise");
    same_program_as(p1, c_.z->first, "first premise");
    same_program_as(p2, c_.z->second, "second premise");
    if (c_.E->op != Op::Compose || c_.E->args.size() != 2) fail("eff is " + show(c_.E) + ", expected E1|E2");
    const ExprPtr& e1 = c_.E->args[0];
    const ExprPtr& e2 = c_.E->args[1];
    field("first premise pre", p1.P, c_.P);
    keep(p1, "first premise", false, true, true, true, false);
    keep(p2, "second premise", false, true, true, true, false);
    field("first premise eff", p1.E, mk_and({p2.P, e1}));
    field("second premise eff", p2.E, e2);
  }

  void if_rule() {
    premises(2);
    kind(Stmt::Kind::If, "an if statement");
    const ExprPtr& b = c_.z->expr;
    for (std::size_t i = 0; i < 2; ++i) {
      const View& p = p_[i];
      const char* which = i == 0 ? "then premise" : "else premise";
      same_sets(p, which);
      same_program_as(p, i == 0 ? c_.z->first : c_.z->second, which);
      keep(p, which, false, true, true, true, true);
      field(i == 0 ? "then premise pre" : "else premise pre", p.P, mk_and({c_.P, i == 0 ? b : mk_not(b)}));
    }
  }

  void while_rule(bool needs_wf) {
    premises(1);
    kind(Stmt::Kind::While, "a while loop");
    const View& p = p_[0];
    const ExprPtr& b = c_.z->expr;
    same_sets(p, "premise");
    same_program_as(p, c_.z->first, "premise");
    keep(p, "premise", false, true, true, true, false);
    field("premise pre", p.P, mk_and({c_.P, b}));
    // eff = (Z+ or R) and not b
    ExprPtr z;
    std::vector<ExprPtr> rest;
    bool negated = false;
    for (const auto& k : conjuncts(c_.E)) {
      if (equal(k, mk_not(b))) negated = true;
      else rest.push_back(k);
    }
    if (negated && rest.size() == 1 && rest[0]->op == Op::Or && rest[0]->args.size() >= 2) {
      const auto& o = rest[0]->args;
      std::vector<ExprPtr> tail(o.begin() + 1, o.end());
      if (o[0]->op == Op::Closure && !o[0]->reflexive && same(mk_or(tail), c_.R)) z = o[0]->args[0];
    }
    if (!z) fail("eff is " + show(c_.E) + ", expected (tc(Z) or R) and not b with R = " + show(c_.R));
    field("premise eff", p.E, mk_and({c_.P, z}));
    if (needs_wf) oblige(z, "while: the body relation is well-founded", Obligation::Kind::WellFounded);
  }

  // Premise wait W or W_j; returns W_j.
  ExprPtr wait_part(const View& p, const char* which) {
    if (same(p.W, c_.W)) return mk_false();
    if (p.W->op == Op::Or) {
      const auto& o = p.W->args;
      for (std::size_t i = 0; i < o.size(); ++i)
        if (same(o[i], c_.W)) {
          std::vector<ExprPtr> rest;
          for (std::size_t j = 0; j < o.size(); ++j)
            if (j != i) rest.push_back(o[j]);
          return mk_or(std::move(rest));
        }
    }
    if (c_.W->op == Op::Lit && !c_.W->lit.as_bool()) return p.W;
    fail(std::string(which) + " wait is " + show(p.W) + ", expected W or W_j with W = " + show(c_.W));
  }

  void parallel() {
    premises(2);
    kind(Stmt::Kind::Par, "a parallel composition");
    const View& p1 = p_[0];
    const View& p2 = p_[1];
    same_sets(p1, "first premise");
    same_sets(p2, "second premise");
    same_program_as(p1, c_.z->first, "first premise");
    same_program_as(p2, c_.z->second, "second premise");
    field("first premise pre", p1.P, c_.P);
    field("second premise pre", p2.P, c_.P);
    field("conclusion rely", c_.R, mk_and({p1.R, p2.R}));
    field("conclusion eff", c_.E, mk_and({p1.E, p2.E}));
    field("first premise guar", p1.G, mk_and({c_.G, p2.R}));
    field("second premise guar", p2.G, mk_and({c_.G, p1.R}));
    ExprPtr w1 = wait_part(p1, "first premise");
    ExprPtr w2 = wait_part(p2, "second premise");
    oblige(mk_and({mk_not(mk_and({w1, p2.E})), mk_not(mk_and({w2, p1.E})), mk_not(mk_and({w1, w2}))}),
           "parallel: the processes never block each other for good");
  }

  // Covers `z` by consecutive premise programs starting at k.
  bool cover(const Prog& z, std::size_t& k) const {
    if (k < p_.size() && same_program(z, p_[k].z)) {
      ++k;
      return true;
    }
    if (z && z->kind == Stmt::Kind::Par) return cover(z->first, k) && cover(z->second, k);
    return false;
  }

  void parallel_general() {
    if (p_.size() < 2) fail("expects at least two premises");
    kind(Stmt::Kind::Par, "a parallel composition");
    std::size_t k = 0;
    if (!cover(c_.z, k) || k != p_.size())
      fail("conclusion program is not the parallel composition of the premise programs in order");
    std::vector<ExprPtr> rs, es, ws;
    for (std::size_t j = 0; j < p_.size(); ++j) {
      const View& p = p_[j];
      std::string which = "premise " + std::to_string(j + 1);
      same_sets(p, which.c_str());
      field((which + " pre").c_str(), p.P, c_.P);
      rs.push_back(p.R);
      es.push_back(p.E);
      ws.push_back(wait_part(p, which.c_str()));
    }
    field("conclusion rely", c_.R, mk_and(rs));
    field("conclusion eff", c_.E, mk_and(es));
    for (std::size_t j = 0; j < p_.size(); ++j) {
      std::vector<ExprPtr> guar{c_.G}, others;
      for (std::size_t i = 0; i < p_.size(); ++i)
        if (i != j) {
          guar.push_back(rs[i]);
          others.push_back(mk_or({ws[i], es[i]}));
        }
      field(("premise " + std::to_string(j + 1) + " guar").c_str(), p_[j].G, mk_and(guar));
      others.insert(others.begin(), ws[j]);
      oblige(mk_not(mk_and(std::move(others))),
             "parallel-general: process " + std::to_string(j + 1) + " is released whenever it blocks");
    }
  }

  void await_rule() {
    premises(1);
    kind(Stmt::Kind::Await, "an await statement");
    const View& p = p_[0];
    const ExprPtr& b = c_.z->expr;
    same_sets(p, "premise");
    same_program_as(p, c_.z->first, "premise");
    ExprPtr reach = mk_preserve(c_.P, c_.R);
    ExprPtr enabled = mk_and({reach, b});
    if (!same(p.P, enabled))
      oblige(mk(Op::Iff, {p.P, enabled}), "await: premise pre denotes the reachable enabled states");
    field("premise rely", p.R, identity_frame(st_, {}, c_.scope));
    field("premise wait", p.W, mk_false());
    field("premise guar", p.G, mk_true());
    ExprPtr e2 = middle_of(c_.E, c_.R);
    std::vector<int> frame(c_.aux.begin(), c_.aux.end());
    oblige(mk_implies(mk_and({reach, mk_not(b)}), c_.W), "await: disabled reachable states satisfy wait");
    ExprPtr step = mk_compose({p.E, mk_and({aux_updates(), identity_frame(st_, frame, c_.scope)})});
    oblige(mk_implies(step, mk_and({c_.G, e2})), "await: the atomic step satisfies guar and eff");
  }

  int single_difference(const std::set<int>& big, const std::set<int>& small, const char* what) {
    if (node_.variable) {
      int v = *node_.variable;
      if (!big.count(v) || small.count(v)) fail(std::string("variable ") + st_.var_name(v) + " is not the " + what);
      std::set<int> expect = small;
      expect.insert(v);
      if (expect != big) fail(std::string("variable sets differ by more than the ") + what);
      return v;
    }
    std::vector<int> diff;
    std::set_difference(big.begin(), big.end(), small.begin(), small.end(), std::back_inserter(diff));
    if (diff.size() != 1 || !std::includes(big.begin(), big.end(), small.begin(), small.end()))
      fail(std::string("variable sets must differ by exactly the ") + what);
    return diff[0];
  }

  void elimination() {
    premises(1);
    const View& p = p_[0];
    same_program_as(p, c_.z, "premise");
    if (p.glo != c_.glo) fail("premise has a different global set");
    int a = single_difference(p.aux, c_.aux, "eliminated variable");
    const auto& decl = st_.var(a);
    Binder now{decl.symbol, false, decl.sort};
    Binder old{decl.symbol, true, decl.sort};
    field("conclusion pre", c_.P, mk_quant(Op::Exists, {now}, p.P));
    field("conclusion rely", c_.R, mk_quant(Op::Forall, {old}, mk_quant(Op::Exists, {now}, p.R)));
    keep(p, "premise", false, false, true, true, true);
    for (const ExprPtr& f : {c_.W, c_.G, c_.E})
      if (free_vars(f).count(a)) fail("wait, guar and eff must not mention " + st_.var_name(a));
  }

  void effect() {
    premises(1);
    const View& p = p_[0];
    same_sets(p, "premise");
    same_program_as(p, c_.z, "premise");
    keep(p, "premise", true, true, true, true, false);
    field("conclusion eff", c_.E, mk_and({p.E, mk_closure(mk_or({p.R, p.G}), false)}));
  }

  void global() {
    premises(1);
    const View& p = p_[0];
    same_program_as(p, c_.z, "premise");
    if (p.aux != c_.aux) fail("premise has a different auxiliary set");
    int v = single_difference(c_.glo, p.glo, "new global variable");
    if (free_vars(c_.z).count(v)) fail(st_.var_name(v) + " occurs in the program");
    keep(p, "premise", true, true, true, false, true);
    field("conclusion guar", c_.G, mk_and({p.G, unchanged(v)}));
  }

  void auxiliary() {
    premises(1);
    const View& p = p_[0];
    same_program_as(p, c_.z, "premise");
    if (p.glo != c_.glo) fail("premise has a different global set");
    int a = single_difference(c_.aux, p.aux, "new auxiliary variable");
    keep(p, "premise", true, true, true, false, true);
    field("conclusion guar", c_.G, mk_and({p.G, unchanged(a)}));
  }

  void introduction() {
    premises(1);
    const View& p = p_[0];
    if (!p.aux.empty()) fail("premise must have no auxiliary variables");
    std::set<int> expect = c_.glo;
    expect.insert(c_.aux.begin(), c_.aux.end());
    if (p.glo != expect) fail("premise global set must be the conclusion's global and auxiliary variables");
    keep(p, "premise", true, true, true, true, true);
    removal_ = RemovalLeaf{p.z, {c_.glo.begin(), c_.glo.end()}, {c_.aux.begin(), c_.aux.end()}, c_.z};
  }
};

std::string show_valuation(const ExprPtr& f, const Valuation& v, const Structure& st) {
  std::set<int> now, before;
  for (auto [var, hooked] : occurrences(f)) (hooked ? before : now).insert(var);
  std::string out;
  if (!before.empty()) out += "old " + st.show_state(v.old, {before.begin(), before.end()});
  if (!now.empty()) out += std::string(out.empty() ? "" : ", ") + "new " + st.show_state(v.cur, {now.begin(), now.end()});
  return out;
}

}  // namespace

const char* rule_name(Rule r) {
  for (const auto& info : kRules)
    if (info.rule == r) return info.name;
  return "?";
}

std::optional<Rule> rule_from_name(const std::string& name) {
  for (const auto& info : kRules)
    if (name == info.name) return info.rule;
  return std::nullopt;
}

RuleCheck validate_rule_instance(const ProofNode& node, const Structure& st) {
  try {
    return Matcher(node, st).run();
  } catch (const SchemaError& e) {
    RuleCheck out;
    out.ok = false;
    out.error = std::string(rule_name(node.rule)) + " rule: " + e.message;
    return out;
  }
}

Discharge discharge_obligation(const Obligation& ob, const Structure& st) {
  Discharge d;
  try {
    if (ob.kind == Obligation::Kind::WellFounded) {
      d.ok = well_founded(ob.formula, st);
      if (!d.ok) d.detail = "relation has a cycle";
      return d;
    }
    auto cex = find_counterexample(ob.formula, st);
    d.ok = !cex;
    if (cex) d.detail = "falsified at " + show_valuation(ob.formula, *cex, st);
  } catch (const EvalError& e) {
    d.ok = false;
    d.detail = std::string("evaluation error: ") + e.what();
  } catch (const ResourceError& e) {
    d.ok = false;
    d.resource = true;
    d.detail = e.what();
  }
  return d;
}

std::size_t proof_depth(const ProofNode& node) {
  std::size_t deepest = 0;
  for (const auto& p : node.premises)
    if (p) deepest = std::max(deepest, proof_depth(*p));
  return deepest + 1;
}

namespace {

class TreeChecker {
 public:
  TreeChecker(const Structure& st, const ProofOptions& opts) : st_(st), opts_(opts) {}

  void visit(const ProofNode& n, const std::string& path) {
    ++report.nodes;
    std::string where = path.empty() ? rule_name(n.rule) : path + " > " + rule_name(n.rule);
    auto issue = [&](std::string msg, std::optional<Obligation> ob = std::nullopt) {
      report.valid = false;
      report.issues.push_back({where, std::move(msg), std::move(ob)});
    };

    try {
      SpecifiedProgram full = n.conclusion;
      full.spec = expand_frames(full.spec, st_);
      validate_specified_program(full, st_, false);
      relation_check(n.conclusion.spec);
    } catch (const InputError& e) {
      issue(std::string("conclusion is not a well-formed specified program: ") + e.what());
    }

    if (opts_.basic_only && n.rule == Rule::Introduction) issue("introduction is not a basic rule");

    if (n.rule == Rule::Checked) {
      checked_leaf(n, issue);
    } else {
      RuleCheck rc = validate_rule_instance(n, st_);
      if (!rc.ok) issue(rc.error);
      for (const auto& ob : rc.obligations) {
        ++report.obligations;
        const Discharge& d = discharge(ob);
        if (d.resource) report.resource = true;
        if (!d.ok) issue("obligation failed (" + ob.origin + "): " + to_string(ob.formula) + "; " + d.detail, ob);
      }
      if (rc.removal) {
        if (opts_.basic_only) issue("removals are not allowed in basic proofs");
        std::string why;
        try {
          if (!check_removal(rc.removal->augmented, rc.removal->glo, rc.removal->aux, rc.removal->plain, &why))
            issue("removal does not hold: " + why);
        } catch (const InputError& e) {
          issue(std::string("removal does not hold: ") + e.what());
        }
      }
    }

    for (std::size_t i = 0; i < n.premises.size(); ++i)
      if (n.premises[i]) visit(*n.premises[i], where + "[" + std::to_string(i + 1) + "]");
  }

  ProofReport report;

 private:
  const Structure& st_;
  const ProofOptions& opts_;
  std::unordered_map<std::string, Discharge> discharged_;
  std::unordered_map<std::string, std::string> relations_;

  const Discharge& discharge(const Obligation& ob) {
    std::string key = (ob.kind == Obligation::Kind::WellFounded ? "wf " : "valid ") + to_string(ob.formula);
    auto it = discharged_.find(key);
    if (it != discharged_.end()) return it->second;
    return discharged_.emplace(key, discharge_obligation(ob, st_)).first->second;
  }

  // Reflexivity and transitivity checks, cached per rely/guar pair.
  void relation_check(const Specification& raw) {
    auto s = expand_frames(raw, st_);
    std::string key = to_string(s.rely) + "\n" + to_string(s.guar);
    auto it = relations_.find(key);
    if (it == relations_.end()) {
      std::string err;
      auto r = classify_relation(s.rely, st_);
      if (!r.reflexive) err = "rely condition is not reflexive";
      else if (!r.transitive) err = "rely condition is not transitive";
      else if (!classify_relation(s.guar, st_).reflexive) err = "guar condition is not reflexive";
      it = relations_.emplace(key, err).first;
    }
    if (!it->second.empty()) throw InputError(it->second);
  }

  template <typename Issue>
  void checked_leaf(const ProofNode& n, Issue& issue) {
    ++report.checked_leaves;
    if (!n.premises.empty()) {
      issue("checked leaves have no premises");
      return;
    }
    if (!n.conclusion.spec.aux.empty() && !n.witness) {
      issue("checked leaf with auxiliary variables needs a witness program");
      return;
    }
    CheckOptions co;
    co.budget = opts_.budget;
    try {
      CheckReport r = check_specified(n.conclusion, n.witness ? &n.witness : nullptr, st_, co);
      if (r.verdict == Verdict::ResourceExceeded) {
        report.resource = true;
        issue("model check exceeded its budget: " + r.detail);
      } else if (r.verdict == Verdict::Invalid) {
        issue(std::string("model check failed (") + clause_name(r.clause) + "): " + r.detail);
      }
    } catch (const InputError& e) {
      issue(std::string("model check rejected the leaf: ") + e.what());
    }
  }
};

}  // namespace

ProofReport check_proof_tree(const ProofNode& root, const Structure& st, const ProofOptions& opts) {
  TreeChecker tc(st, opts);
  tc.visit(root, "");
  tc.report.depth = proof_depth(root);
  return tc.report;
}

}  // namespace lsp
