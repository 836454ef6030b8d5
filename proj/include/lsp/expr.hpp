#pragma once

#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lsp/structure.hpp"

namespace lsp {

enum class Op {
  Var,
  Lit,
  Not,
  Neg,
  Card,
  Len,
  Max,
  Min,
  And,
  Or,
  Implies,
  Iff,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Index,
  Concat,
  Union,
  Inter,
  Diff,
  In,
  NotIn,
  Subset,
  SeqLit,
  SetLit,
  Forall,
  Exists,
  // Relational operators over the finite structure.
  Compose,
  Closure,   // transitive; `reflexive` adds the identity
  Preserve,  // least state set containing args[0], closed under args[1]
  Identity,  // v = ~v for every scope variable not in `frame`
  Hook,
  Table,     // explicit set of states or state pairs
};

struct Binder {
  int sym = -1;
  bool hooked = false;
  SortPtr sort;
  bool operator==(const Binder& o) const { return sym == o.sym && hooked == o.hooked && sort == o.sort; }
};

// Explicit relation (binary) or state set (unary) over `vars`. Binary rows
// hold the old tuple followed by the new tuple.
struct Table {
  std::vector<int> vars;
  bool binary = false;
  std::set<std::vector<Value>> rows;
};

struct RelCache;
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::Lit;
  int sym = -1;        // variable name
  bool hooked = false;
  int var = -1;        // state variable id; -1 for a bound reference
  bool reflexive = false;
  Value lit;
  std::vector<ExprPtr> args;
  std::vector<Binder> binders;
  std::vector<int> frame;
  std::vector<int> frame_syms;
  std::shared_ptr<const Table> table;
  std::size_t hash = 0;
  mutable std::shared_ptr<RelCache> cache;
  mutable std::mutex cache_mu;
};

// Construction.
ExprPtr mk_var(const Structure& st, int var, bool hooked = false);
ExprPtr mk_bound(int sym, bool hooked = false);
ExprPtr mk_lit(Value v);
ExprPtr mk_true();
ExprPtr mk_false();
ExprPtr mk_int(std::int64_t n);
ExprPtr mk(Op op, std::vector<ExprPtr> args);
ExprPtr mk_not(ExprPtr a);
ExprPtr mk_and(std::vector<ExprPtr> args);  // empty -> true
ExprPtr mk_or(std::vector<ExprPtr> args);   // empty -> false
ExprPtr mk_implies(ExprPtr a, ExprPtr b);
ExprPtr mk_eq(ExprPtr a, ExprPtr b);
// Quantifier; free state-variable occurrences matching a binder become bound.
ExprPtr mk_quant(Op op, std::vector<Binder> binders, ExprPtr body);
ExprPtr mk_compose(std::vector<ExprPtr> args);  // left-nested
ExprPtr mk_closure(ExprPtr a, bool reflexive);
ExprPtr mk_preserve(ExprPtr a, ExprPtr b);
ExprPtr mk_identity(const Structure& st, std::vector<int> frame);
ExprPtr mk_hook(ExprPtr a);
ExprPtr mk_table(std::shared_ptr<const Table> t);

bool equal(const ExprPtr& a, const ExprPtr& b);
std::string to_string(const ExprPtr& e);

// (state variable, hooked) pairs the value of `e` depends on.
std::set<std::pair<int, bool>> occurrences(const ExprPtr& e);
// Unhooked versions of the free variables.
std::set<int> free_vars(const ExprPtr& e);
bool is_unary(const ExprPtr& e);

// Replaces every unhooked free occurrence by its hooked version.
ExprPtr hook_expression(const ExprPtr& e);
// Conjunction of v = ~v over `scope` minus `frame`.
ExprPtr identity_frame(const Structure& st, const std::vector<int>& frame, const std::vector<int>& scope);
// Replaces Identity nodes by their expansion in `scope`.
ExprPtr expand_identity(const Structure& st, const ExprPtr& e, const std::vector<int>& scope);
// Conjunct list with nested conjunctions flattened.
std::vector<ExprPtr> conjuncts(const ExprPtr& e);
// Matching modulo associativity, commutativity and idempotence of `and`.
bool same_modulo_and(const ExprPtr& a, const ExprPtr& b);
// Substitutes expressions for unhooked free state variables.
ExprPtr substitute(const ExprPtr& e, int var, const ExprPtr& replacement);

// Static type, using the declared sorts. Throws InputError on a clash.
Type type_of(const Structure& st, const ExprPtr& e);

}  // namespace lsp
