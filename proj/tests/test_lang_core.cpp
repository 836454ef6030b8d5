#include <doctest.h>

#include <functional>
#include <random>

#include "support.hpp"

using namespace lsp;
using testing::expr;
using testing::prog;
using testing::var;

namespace {

SourceFile decls() {
  return parse_source(
      "sort Sym = enum {A, B};\n"
      "var x, y, v, w : 0..99;\n"
      "var b : bool;\n"
      "var a1, a2 : 0..99;\n"
      "var q : seq Sym max 2;\n"
      "var s : set 0..2;\n");
}

bool has_violation(const ValidationResult& r, const std::string& id) {
  for (const auto& v : r.violations)
    if (v.constraint == id) return true;
  return false;
}

std::set<int> names(const SourceFile& f, std::initializer_list<const char*> ns) {
  std::set<int> out;
  for (auto n : ns) out.insert(var(f, n));
  return out;
}

}  // namespace

TEST_CASE("carriers") {
  SourceFile f = decls();
  CHECK(f.st->var(var(f, "b")).sort->carrier == std::vector<Value>{Value::boolean(false), Value::boolean(true)});
  CHECK(f.st->var(var(f, "x")).sort->carrier.size() == 100);
  // [], [A], [B], and the four pairs
  CHECK(f.st->var(var(f, "q")).sort->carrier.size() == 7);
  CHECK(f.st->var(var(f, "s")).sort->carrier.size() == 8);
  auto r = make_range_sort("r", 3, 5);
  CHECK(r->in_carrier(Value::integer(4)));
  CHECK_FALSE(r->in_carrier(Value::integer(6)));
}

TEST_CASE("values order and print") {
  CHECK(Value::set({Value::integer(2), Value::integer(1), Value::integer(2)}).str() == "{1, 2}");
  CHECK(Value::sequence({Value::integer(2), Value::integer(1)}).str() == "[2, 1]");
  CHECK(Value::integer(1) < Value::integer(2));
  CHECK(Value::boolean(true).str() == "true");
}

TEST_CASE("program expressions reject hooks, quantifiers and sort clashes") {
  SourceFile f = decls();
  for (const char* t : {"x := ~x", "b := forall y . y = x"}) {
    CAPTURE(t);
    CHECK(has_violation(validate_program(prog(f, t), *f.st), "sort"));
  }
  CHECK(has_violation(validate_program(prog(f, "x := b"), *f.st), "assignment-sort"));
  CHECK(has_violation(validate_program(prog(f, "x := x + b"), *f.st), "assignment-sort"));
  CHECK(validate_program(prog(f, "x := x + y * 2"), *f.st).ok());
}

TEST_CASE("validation constraints") {
  SourceFile f = decls();
  SUBCASE("init before read") {
    auto r = validate_program(prog(f, "begin loc y; x := y end"), *f.st);
    CHECK(has_violation(r, "init-before-read"));
    CHECK(r.violations[0].loc.line == 1);
  }
  SUBCASE("skip is fine") { CHECK(validate_program(prog(f, "skip"), *f.st).ok()); }
  SUBCASE("test of a parallel arm reads a global") {
    auto r = validate_program(prog(f, "{ (if v = 0 then skip else skip fi) || skip }"), *f.st);
    CHECK(has_violation(r, "boolean-test"));
  }
  SUBCASE("local test inside an arm") {
    auto r = validate_program(prog(f, "{ begin loc y; y := v; if y = 0 then x := 1 fi end || skip }"), *f.st);
    CHECK(r.ok());
  }
  SUBCASE("await test may read shared variables") {
    auto r = validate_program(prog(f, "{ await v = 0 do skip od || v := 0 }"), *f.st);
    CHECK(r.ok());
    CHECK_FALSE(r.notes.empty());
  }
  SUBCASE("redeclaration") {
    auto r = validate_program(prog(f, "begin loc y; y := 0; begin loc y; y := 1 end end"), *f.st);
    CHECK(has_violation(r, "declaration"));
  }
  SUBCASE("assignment sort") {
    auto r = validate_program(mk_assign(var(f, "x"), mk_lit(Value::boolean(true))), *f.st);
    CHECK(has_violation(r, "assignment-sort"));
  }
  SUBCASE("non-boolean test") {
    auto r = validate_program(mk_while(mk_var(*f.st, var(f, "x")), mk_skip()), *f.st);
    CHECK(has_violation(r, "sort"));
  }
  SUBCASE("idempotent") {
    Prog p = prog(f, "begin loc y; x := y; { (if v = 0 then skip fi) || skip } end");
    auto r1 = validate_program(p, *f.st);
    auto r2 = validate_program(p, *f.st);
    REQUIRE(r1.violations.size() == r2.violations.size());
    for (std::size_t i = 0; i < r1.violations.size(); ++i) {
      CHECK(r1.violations[i].constraint == r2.violations[i].constraint);
      CHECK(r1.violations[i].message == r2.violations[i].message);
    }
  }
}

TEST_CASE("hid and free variables") {
  SourceFile f = decls();
  CHECK(hid_set(prog(f, "begin loc y; y := v; while x < 100 do x := x + y od end")) == names(f, {"x", "y"}));
  CHECK(hid_set(prog(f, "skip")).empty());
  CHECK(hid_set(prog(f, "await b do w := 1 od")).empty());
  CHECK(free_vars(expr(f, "x + ~y")) == names(f, {"x", "y"}));
  CHECK(free_vars(prog(f, "begin loc y; y := v end")) == names(f, {"y", "v"}));
  CHECK(free_vars(expr(f, "5")).empty());
  CHECK(global_vars(prog(f, "begin loc y; y := v end")) == names(f, {"v"}));
}

TEST_CASE("removal relation") {
  SourceFile f = decls();
  Prog plain = prog(f, "x := x + y; await b do skip od; x := x + y");
  Prog aug = prog(f,
                  "await true do a1 := a1 + x; x := x + y od;"
                  "await b do skip; a1 := a1 + x od;"
                  "await true do a2 := x; x := x + y od");
  std::vector<int> glo{var(f, "x"), var(f, "y"), var(f, "b")};
  std::vector<int> aux{var(f, "a1"), var(f, "a2")};
  std::string why;
  CHECK(check_removal(aug, glo, aux, plain, &why));
  CHECK(same_program(erase_auxiliary(aug, aux), plain));
  CHECK(check_removal(prog(f, "skip"), {}, {}, prog(f, "skip")));

  SUBCASE("update reading another auxiliary variable") {
    Prog bad = prog(f, "await true do a1 := a2; x := x + y od; await b do skip od; x := x + y");
    CHECK_FALSE(check_removal(bad, glo, aux, plain, &why));
    CHECK_THROWS_AS(erase_auxiliary(bad, aux), InputError);
  }
  SUBCASE("same auxiliary assigned twice in one wrapper") {
    Prog bad = prog(f, "await true do a1 := 1; a1 := 2; x := x + y od; await b do skip od; x := x + y");
    CHECK_FALSE(check_removal(bad, glo, aux, plain));
  }
  SUBCASE("auxiliary assignment outside a wrapper") {
    Prog bad = prog(f, "a1 := 1; x := x + y; await b do skip od; x := x + y");
    CHECK_FALSE(check_removal(bad, glo, aux, plain));
  }
  SUBCASE("wrong plain program") {
    CHECK_FALSE(check_removal(aug, glo, aux, prog(f, "x := x + y; await b do skip od; x := x + 1")));
  }
  SUBCASE("overlapping sets") { CHECK_FALSE(check_removal(aug, {var(f, "x"), var(f, "a1")}, aux, plain)); }
  SUBCASE("no auxiliaries leaves the program alone") {
    Prog z = prog(f, "while b do x := x + 1 od");
    CHECK(same_program(erase_auxiliary(z, {}), z));
  }
}

// Random augmentations: erasing gives back the plain program, the removal
// relation holds, and it fails for any other plain program.
TEST_CASE("augmentation round trip and uniqueness") {
  SourceFile f = decls();
  std::mt19937 rng(7);
  const int x = var(f, "x"), y = var(f, "y"), b = var(f, "b"), a1 = var(f, "a1"), a2 = var(f, "a2");
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  auto rhs = [&]() -> ExprPtr {
    switch (pick(3)) {
      case 0: return mk(Op::Add, {mk_var(*f.st, x), mk_int(1)});
      case 1: return mk_var(*f.st, y);
      default: return mk_int(pick(5));
    }
  };
  auto aux_rhs = [&](int a) -> ExprPtr {
    return pick(2) ? mk(Op::Add, {mk_var(*f.st, a), mk_var(*f.st, x)}) : mk_var(*f.st, y);
  };
  // Returns {plain, augmented}.
  std::function<std::pair<Prog, Prog>(int)> gen = [&](int depth) -> std::pair<Prog, Prog> {
    int k = depth <= 0 ? pick(2) : pick(6);
    switch (k) {
      case 0: return {mk_skip(), mk_skip()};
      case 1: {
        Prog asg = mk_assign(pick(2) ? x : y, rhs());
        if (pick(2)) return {asg, asg};
        std::vector<Prog> body;
        if (pick(2)) body.push_back(mk_assign(a1, aux_rhs(a1)));
        if (pick(2)) body.push_back(mk_assign(a2, aux_rhs(a2)));
        if (body.empty()) return {asg, asg};
        body.push_back(asg);
        return {asg, mk_await(mk_true(), mk_seq_list(body))};
      }
      case 2: {
        auto [p1, q1] = gen(depth - 1);
        auto [p2, q2] = gen(depth - 1);
        return {mk_seq(p1, p2), mk_seq(q1, q2)};
      }
      case 3: {
        auto [p1, q1] = gen(depth - 1);
        auto [p2, q2] = gen(depth - 1);
        return {mk_if(mk_var(*f.st, b), p1, p2), mk_if(mk_var(*f.st, b), q1, q2)};
      }
      case 4: {
        auto [p1, q1] = gen(depth - 1);
        return {mk_while(mk_var(*f.st, b), p1), mk_while(mk_var(*f.st, b), q1)};
      }
      default: {
        // Await bodies hold no awaits; only trailing auxiliary updates are added.
        Prog body = mk_assign(x, rhs());
        std::vector<Prog> aug{body};
        if (pick(2)) aug.push_back(mk_assign(a1, aux_rhs(a1)));
        return {mk_await(mk_var(*f.st, b), body), mk_await(mk_var(*f.st, b), mk_seq_list(aug))};
      }
    }
  };
  std::vector<int> aux{a1, a2};
  for (int i = 0; i < 300; ++i) {
    auto [p, q] = gen(3);
    // Updates read x and y, so both must be global in the plain program.
    Prog head = mk_assign(x, mk_var(*f.st, y));
    Prog plain = mk_seq(head, p);
    Prog aug = mk_seq(head, q);
    std::set<int> g = global_vars(plain);
    std::vector<int> theta(g.begin(), g.end());
    std::string why;
    CHECK(same_program(erase_auxiliary(aug, aux), plain));
    CHECK_MESSAGE(check_removal(aug, theta, aux, plain, &why), why);
    CHECK_FALSE(check_removal(aug, theta, aux, mk_seq(plain, mk_skip())));
    CHECK_FALSE(check_removal(aug, theta, aux, mk_seq(mk_skip(), p)));
  }
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_source("var x : 0..3;\nprogram { x := }\n", "t.lsp");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).rfind("t.lsp:2:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_source("var x : nosuch;"), InputError);
  CHECK_THROWS_AS(parse_source("var x : 0..3; program { y := 1 }"), InputError);
}

TEST_CASE("sequence bound is a hard error") {
  SourceFile f = parse_source(
      "sort Sym = enum {A, B};\nvar q : seq Sym max 1;\n"
      "program { q := [A] ++ q }\n"
      "spec { glo q; pre true; rely I; wait false; guar true; eff true; }\n");
  CheckReport r = testing::check_file(f);
  CHECK(r.verdict == Verdict::Invalid);
  CHECK(r.clause == Clause::Evaluation);
}
