#pragma once

#include <set>
#include <vector>

#include "lsp/eval.hpp"

namespace lsp {

using Tuple = std::vector<Value>;

// Explicit relation over the projection onto `vars`.
struct StateRelation {
  std::vector<int> vars;
  std::set<std::pair<Tuple, Tuple>> pairs;
};

struct StateSet {
  std::vector<int> vars;
  std::set<Tuple> states;
};

Tuple project(const State& s, const std::vector<int>& vars);

// Enumerates the relation denoted by a binary assertion over `vars`
// (defaults to its free variables).
StateRelation materialize_relation(const ExprPtr& a, const Structure& st, std::vector<int> vars = {});
StateSet materialize_set(const ExprPtr& a, const Structure& st, std::vector<int> vars = {});

ExprPtr to_assertion(const StateRelation& r);
ExprPtr to_assertion(const StateSet& s);

// Syntactic constructors for the relational operators.
ExprPtr rel_compose(const ExprPtr& a, const ExprPtr& b);
ExprPtr trans_closure(const ExprPtr& a, bool reflexive);
ExprPtr preserve_under(const ExprPtr& a, const ExprPtr& b);

struct RelationClass {
  bool reflexive = false;
  bool transitive = false;
  bool respects = false;  // pairs agree on the given variable set
};

// Classification over the carriers of `scope` (free variables are added).
RelationClass classify_relation(const ExprPtr& a, const Structure& st, const std::vector<int>& respect_vars = {});

// On a finite carrier well-foundedness is acyclicity (self-loops included).
bool well_founded(const ExprPtr& a, const Structure& st);
bool well_founded(const StateRelation& r);

}  // namespace lsp
