#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace lsp;
using testing::expr;
using testing::var;

namespace {

SourceFile small() { return parse_source("var x, y : 0..3;\nvar n : 0..5;\nvar z : 0..10;\n"); }

State at(const SourceFile& f, std::initializer_list<std::pair<const char*, std::int64_t>> vals) {
  State s = f.st->default_state();
  for (auto [n, v] : vals) s[static_cast<std::size_t>(var(f, n))] = Value::integer(v);
  return s;
}

oracle::Graph as_graph(const StateRelation& r) {
  REQUIRE(r.vars.size() == 1);
  oracle::Graph g;
  for (const auto& [a, b] : r.pairs) g.insert({static_cast<int>(a[0].as_int()), static_cast<int>(b[0].as_int())});
  return g;
}

ExprPtr table_of(const oracle::Graph& g, int v) {
  auto t = std::make_shared<Table>();
  t->vars = {v};
  t->binary = true;
  for (auto [a, b] : g) t->rows.insert({Value::integer(a), Value::integer(b)});
  return mk_table(t);
}

}  // namespace

TEST_CASE("evaluation") {
  SourceFile f = small();
  CHECK(holds(expr(f, "z = ~z + 5"), *f.st, at(f, {{"z", 2}}), at(f, {{"z", 7}})));
  CHECK_FALSE(holds(expr(f, "forall x . x > 15"), *f.st, f.st->default_state()));
  CHECK(holds(expr(f, "exists x . x = 3"), *f.st, f.st->default_state()));
  CHECK(holds(expr(f, "forall k : 0..2 . k < 3"), *f.st, f.st->default_state()));
  CHECK(holds(expr(f, "len([1, 2] ++ [3]) = 3 and [4, 5][1] = 4"), *f.st, f.st->default_state()));
  CHECK(holds(expr(f, "#({1, 2} union {2, 3}) = 3 and max({1, 7}) = 7 and 2 in {2} and {1} subset {1, 2}"), *f.st,
              f.st->default_state()));
  CHECK(holds(expr(f, "7 % 3 = 1 and 7 / 2 = 3"), *f.st, f.st->default_state()));
  CHECK_THROWS_AS(holds(expr(f, "[1][3] = 1"), *f.st, f.st->default_state()), EvalError);
  CHECK_THROWS_AS(holds(expr(f, "min({}) = 0"), *f.st, f.st->default_state()), EvalError);
}

TEST_CASE("a formula and its negation never both hold") {
  SourceFile f = small();
  for (const char* t : {"x < y", "x = ~x + 1", "exists y . y > x", "x + y = 3 => x = y"}) {
    ExprPtr a = expr(f, t);
    CHECK(valid(mk_not(mk_and({a, mk_not(a)})), *f.st));
  }
}

TEST_CASE("hooking") {
  SourceFile f = small();
  CHECK(to_string(hook_expression(expr(f, "x + 1"))) == "~x + 1");
  CHECK(to_string(hook_expression(expr(f, "~x"))) == "~x");
  CHECK(to_string(hook_expression(expr(f, "exists y . x = y"))) == to_string(expr(f, "exists y . ~x = y")));
}

TEST_CASE("identity frames") {
  SourceFile f = small();
  int x = var(f, "x"), y = var(f, "y");
  CHECK(to_string(identity_frame(*f.st, {x}, {x, y})) == "y = ~y");
  CHECK(equal(identity_frame(*f.st, {x, y}, {x, y}), mk_true()));
  CHECK(to_string(identity_frame(*f.st, {}, {x})) == "x = ~x");
  CHECK(to_string(expand_identity(*f.st, expr(f, "I{x}"), {x, y})) == "y = ~y");
}

TEST_CASE("composition") {
  SourceFile f = small();
  int n = var(f, "n");
  StateRelation two = materialize_relation(expr(f, "n = ~n + 1 | n = ~n + 1"), *f.st, {n});
  StateRelation direct = materialize_relation(expr(f, "n = ~n + 2"), *f.st, {n});
  CHECK(two.pairs == direct.pairs);
  CHECK(two.pairs.size() == 4);
  // identity is a unit on both sides
  ExprPtr a = expr(f, "n >= ~n and n != 3");
  CHECK(materialize_relation(rel_compose(a, expr(f, "n = ~n")), *f.st, {n}).pairs ==
        materialize_relation(a, *f.st, {n}).pairs);
  CHECK(materialize_relation(rel_compose(expr(f, "n = ~n"), a), *f.st, {n}).pairs ==
        materialize_relation(a, *f.st, {n}).pairs);
}

TEST_CASE("composition example with two variables") {
  SourceFile f = parse_source("var v1 : 0..80;\nvar v2 : 0..9;\n");
  ExprPtr c = expr(f,
                   "(~v1 = 5 and v1 = 77 and v2 >= ~v2) | (~v1 = 77 and v1 = 5 and v2 = ~v2 + 5)");
  ExprPtr simplified = expr(f, "exists t : 0..9 . ~v1 = 5 and t >= ~v2 and v1 = 5 and v2 = t + 5");
  CHECK(valid(mk(Op::Iff, {c, simplified}), *f.st));
  StateRelation r = materialize_relation(c, *f.st);
  // ~v2 in 0..4, v2 in ~v2+5..9
  CHECK(r.pairs.size() == 15);
}

TEST_CASE("closures") {
  SourceFile f = small();
  int x = var(f, "x");
  StateRelation t = materialize_relation(expr(f, "tc(x = ~x + 1)"), *f.st, {x});
  CHECK(t.pairs.size() == 6);
  CHECK(t.pairs == materialize_relation(expr(f, "x > ~x"), *f.st, {x}).pairs);
  CHECK(materialize_relation(expr(f, "tc(x = ~x)"), *f.st, {x}).pairs ==
        materialize_relation(expr(f, "x = ~x"), *f.st, {x}).pairs);
  CHECK(materialize_relation(expr(f, "rtc(x = ~x + 1)"), *f.st, {x}).pairs ==
        materialize_relation(expr(f, "x >= ~x"), *f.st, {x}).pairs);
}

TEST_CASE("closure over two variables") {
  SourceFile f = parse_source("var v1 : 0..12;\nvar v2 : 0..2;\n");
  ExprPtr c = expr(f, "tc(v1 = ~v1 + 5 and v2 >= ~v2)");
  ExprPtr chars = expr(f, "exists m : 1..3 . v1 = ~v1 + 5 * m and v2 >= ~v2");
  CHECK(valid(mk(Op::Iff, {c, chars}), *f.st));
}

TEST_CASE("random closures and compositions against the naive oracle") {
  SourceFile f = small();
  int n = var(f, "n");
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    oracle::Graph a, b;
    for (int p = 0; p < 6; ++p)
      for (int q = 0; q < 6; ++q) {
        if (rng() % 5 == 0) a.insert({p, q});
        if (rng() % 5 == 0) b.insert({p, q});
      }
    ExprPtr ta = table_of(a, n), tb = table_of(b, n);
    CHECK(as_graph(materialize_relation(trans_closure(ta, false), *f.st, {n})) == oracle::closure(a));
    oracle::Graph refl = a;
    for (int p = 0; p < 6; ++p) refl.insert({p, p});
    CHECK(as_graph(materialize_relation(trans_closure(ta, true), *f.st, {n})) == oracle::closure(refl));
    CHECK(as_graph(materialize_relation(rel_compose(ta, tb), *f.st, {n})) == oracle::compose(a, b));
    // preservation from {0}
    StateSet s = materialize_set(preserve_under(expr(f, "n = 0"), ta), *f.st, {n});
    std::set<int> got;
    for (const auto& t : s.states) got.insert(static_cast<int>(t[0].as_int()));
    CHECK(got == oracle::preserve({0}, a));
    CHECK(well_founded(ta, *f.st) == !oracle::has_cycle_all_paths(6, a));
  }
}

TEST_CASE("preservation") {
  SourceFile f = small();
  int x = var(f, "x");
  CHECK(materialize_set(expr(f, "pres(x = 0, x = ~x)"), *f.st, {x}).states.size() == 1);
  CHECK(materialize_set(expr(f, "pres(x = 0, x = ~x + 1)"), *f.st, {x}).states.size() == 4);
  // closed: one more step from {1, 3} stays inside
  StateSet s = materialize_set(expr(f, "pres(x = 1, x = ~x + 2)"), *f.st, {x});
  CHECK(s.states == std::set<Tuple>{{Value::integer(1)}, {Value::integer(3)}});
}

TEST_CASE("relation classes") {
  SourceFile f = small();
  int x = var(f, "x"), y = var(f, "y");
  auto i = classify_relation(expr(f, "x = ~x and y = ~y"), *f.st, {x, y});
  CHECK(i.reflexive);
  CHECK(i.transitive);
  CHECK(i.respects);
  auto ge = classify_relation(expr(f, "x >= ~x"), *f.st, {x});
  CHECK(ge.reflexive);
  CHECK(ge.transitive);
  CHECK_FALSE(ge.respects);
  auto inc = classify_relation(expr(f, "x = ~x + 1"), *f.st);
  CHECK_FALSE(inc.reflexive);
  CHECK_FALSE(inc.transitive);
}

TEST_CASE("well-foundedness") {
  SourceFile f = small();
  CHECK(well_founded(expr(f, "x < ~x"), *f.st));
  CHECK_FALSE(well_founded(expr(f, "x = ~x"), *f.st));
  CHECK_FALSE(well_founded(expr(f, "x >= ~x"), *f.st));
  SourceFile sp = parse_source("sort Elem = 0..3;\nvar mx, mn : Elem;\nvar s, l : set Elem;\n");
  CHECK(well_founded(expr(sp, "mx - mn < ~mx - ~mn"), *sp.st));
}

TEST_CASE("counterexamples to validity") {
  SourceFile f = small();
  auto c = find_counterexample(expr(f, "x >= ~x => x = ~x"), *f.st);
  REQUIRE(c);
  int x = var(f, "x");
  CHECK(c->cur[static_cast<std::size_t>(x)].as_int() > c->old[static_cast<std::size_t>(x)].as_int());
  CHECK_FALSE(find_counterexample(expr(f, "x = ~x => x >= ~x"), *f.st));
}

TEST_CASE("matching modulo and") {
  SourceFile f = small();
  CHECK(same_modulo_and(expr(f, "x = 0 and (y = 1 and x = 0)"), expr(f, "y = 1 and x = 0")));
  CHECK_FALSE(same_modulo_and(expr(f, "x = 0 and y = 1"), expr(f, "x = 0 or y = 1")));
  CHECK(to_string(substitute(expr(f, "x + y = 2"), var(f, "x"), expr(f, "y + 1"))) == "y + 1 + y = 2");
}

TEST_CASE("type errors") {
  SourceFile f = parse_source("var x : 0..3;\nvar b : bool;\n");
  CHECK_THROWS_AS(expr(f, "x and b"), InputError);
  CHECK_THROWS_AS(expr(f, "x = b"), InputError);
  CHECK_THROWS_AS(parse_source("var x : 0..3;\nassert x + 1;\n"), InputError);
  CHECK_THROWS_AS(parse_source("var x : 0..3;\nspec { glo x; pre x; rely I; wait false; guar true; eff true; }\n"),
                  InputError);
}
