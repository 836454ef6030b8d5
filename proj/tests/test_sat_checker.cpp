#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace lsp;
using testing::expr;
using testing::prog;
using testing::spec;
using testing::var;

namespace {

SourceFile counter() { return parse_source("var v : 0..3;\nvar b : bool;\nvar d : bool;\n"); }

CheckReport run(SourceFile& f, const std::string& z, const Specification& s, Bracket br = Bracket::Curly,
                const Prog* witness = nullptr, std::size_t budget = 1000000) {
  SpecifiedProgram sp{prog(f, z), s, br};
  CheckOptions opts;
  opts.budget = budget;
  return check_specified(sp, witness, *f.st, opts);
}

}  // namespace

TEST_CASE("skip satisfies its strongest spec") {
  SourceFile f = counter();
  CheckReport r = run(f, "skip", spec(f, {"v"}, "true", "v = ~v", "false", "v = ~v", "v = ~v"));
  CHECK(r.verdict == Verdict::Valid);
  CHECK(r.stats.configurations == 8);
}

TEST_CASE("an increment does not leave v unchanged") {
  SourceFile f = counter();
  Specification s = spec(f, {"v"}, "v < 3", "v = ~v", "false", "true", "v = ~v");
  SpecifiedProgram sp{prog(f, "v := v + 1"), s, Bracket::Curly};
  CheckReport r = check_specified(sp, nullptr, *f.st);
  CHECK(r.verdict == Verdict::Invalid);
  CHECK(r.clause == Clause::Eff);
  REQUIRE(r.counterexample);
  CHECK_FALSE(replay(*r.counterexample, sp, sp.program, *f.st));
  // the counterexample starts in a pre state and ends terminated
  const auto& cx = *r.counterexample;
  CHECK(holds(s.pre, *f.st, cx.configs.front().state));
  CHECK_FALSE(cx.configs.back().prog);
}

TEST_CASE("guar and wait clauses") {
  SourceFile f = counter();
  SUBCASE("guar") {
    CheckReport r = run(f, "v := 0", spec(f, {"v"}, "true", "v = ~v", "false", "v >= ~v", "true"));
    CHECK(r.clause == Clause::Guar);
  }
  SUBCASE("wait") {
    CheckReport r = run(f, "await v > 0 do skip od", spec(f, {"v"}, "true", "v = ~v", "false", "true", "true"));
    CHECK(r.clause == Clause::Wait);
    CHECK(run(f, "await v > 0 do skip od", spec(f, {"v"}, "true", "v = ~v", "v = 0", "true", "true")).verdict ==
          Verdict::Valid);
  }
  SUBCASE("divergence") {
    CheckReport r =
        run(f, "while v < 3 do skip od", spec(f, {"v"}, "true", "v = ~v", "false", "true", "true"));
    CHECK(r.clause == Clause::Convergence);
    REQUIRE(r.counterexample);
    CHECK(r.counterexample->cycle_start);
  }
  SUBCASE("evaluation error") {
    CheckReport r = run(f, "v := v / (v - v)", spec(f, {"v"}, "true", "v = ~v", "false", "true", "true"));
    CHECK(r.clause == Clause::Evaluation);
  }
}

TEST_CASE("square brackets ignore divergence but not await divergence") {
  SourceFile f = counter();
  Specification s = spec(f, {"v"}, "true", "v = ~v", "false", "true", "false");
  CHECK(run(f, "while true do skip od", s, Bracket::Square).verdict == Verdict::Valid);
  CheckReport r = run(f, "await true do begin loc b; b := true; while b do skip od end od", s, Bracket::Square);
  CHECK(r.verdict == Verdict::Invalid);
  CHECK(r.clause == Clause::LspsAwaitTermination);
}

TEST_CASE("counter pair") {
  CheckReport r = testing::check_file(parse_file(testing::corpus("counter_pair.lsp")));
  CHECK(r.verdict == Verdict::Valid);
}

TEST_CASE("auxiliary witnesses") {
  SourceFile ok = parse_file(testing::corpus("buffer_done.lsp"));
  CHECK(testing::check_file(ok).verdict == Verdict::Valid);
  SourceFile bad = parse_file(testing::corpus("buffer_done_bad_aux.lsp"));
  CheckReport r = testing::check_file(bad);
  CHECK(r.verdict == Verdict::Invalid);
  CHECK(r.clause == Clause::AuxRemoval);

  // dropping the aux variable from guar makes the witness fail guar
  SourceFile f = counter();
  Specification s = spec(f, {"v"}, "not d", "v = ~v and d = ~d", "false", "v = ~v and d = ~d", "d", {"d"});
  Prog w = prog(f, "await true do d := true; v := v od");
  CHECK(run(f, "v := v", s, Bracket::Curly, &w).clause == Clause::Guar);
}

TEST_CASE("invariant clause") {
  SourceFile f = counter();
  SpecifiedProgram sp{prog(f, "v := 2; v := 0"), spec(f, {"v"}, "v = 0", "v = ~v", "false", "true", "true"),
                      Bracket::Curly};
  CheckOptions opts;
  opts.invariant = expr(f, "v < 2");
  CheckReport r = check_specified(sp, nullptr, *f.st, opts);
  CHECK(r.clause == Clause::Invariant);
  opts.invariant = expr(f, "v < 3");
  CHECK(check_specified(sp, nullptr, *f.st, opts).verdict == Verdict::Valid);
}

TEST_CASE("budget") {
  SourceFile f = parse_source("var v : 0..50;\n");
  Specification s = spec(f, {"v"}, "true", "v >= ~v", "false", "true", "true");
  CheckReport r = run(f, "v := v + 1; v := v + 1", s, Bracket::Curly, nullptr, 10);
  CHECK(r.verdict == Verdict::ResourceExceeded);
}

TEST_CASE("strongest guar of the two-step counter") {
  SourceFile f = parse_file(testing::corpus("strongest_guar.lsp"));
  int v = var(f, "v");
  SpecifiedProgram sp = f.specified_program();
  Strongest s = strongest_relations(sp.program, sp.spec.glo, sp.spec.pre, sp.spec.rely, *f.st);
  std::set<std::pair<std::int64_t, std::int64_t>> got;
  for (const auto& [a, b] : s.guar.pairs) got.insert({a[0].as_int(), b[0].as_int()});
  auto carrier = f.st->var(v).sort->carrier;
  CHECK(got == oracle::counter_strongest_guar(carrier.back().as_int()));
  CHECK(offset_summary(s.guar, *f.st) == "v = ~v or v = ~v + 1 or v = ~v + 2");
  CHECK(s.wait.states.empty());
}

// The strongest relations are satisfied by the program, and each is
// contained in any relation the checker accepts.
TEST_CASE("strongest relations are least") {
  SourceFile f = counter();
  struct Case {
    const char* z;
    const char* pre;
    const char* rely;
  };
  for (Case c : {Case{"v := v + 1", "v < 3", "v = ~v"}, Case{"await v > 0 do v := v - 1 od", "true", "v >= ~v"},
                 Case{"if b then v := 0 else skip fi", "true", "v = ~v and b = ~b"},
                 Case{"while v > 0 do v := v - 1 od", "true", "v <= ~v"}}) {
    CAPTURE(c.z);
    std::vector<int> glo{var(f, "v"), var(f, "b")};
    Strongest s = strongest_relations(prog(f, c.z), glo, expr(f, c.pre), expr(f, c.rely), *f.st);
    Specification sp;
    sp.glo = glo;
    sp.pre = expr(f, c.pre);
    sp.rely = expr(f, c.rely);
    sp.eff = to_assertion(s.eff);
    sp.wait = to_assertion(s.wait);
    ExprPtr id = expr(f, "v = ~v and b = ~b");
    sp.guar = mk_or({to_assertion(s.guar), id});
    CHECK(run(f, c.z, sp).verdict == Verdict::Valid);
    // remove one eff pair: the checker must now reject
    if (!s.eff.pairs.empty()) {
      StateRelation smaller = s.eff;
      smaller.pairs.erase(smaller.pairs.begin());
      sp.eff = to_assertion(smaller);
      CHECK(run(f, c.z, sp).clause == Clause::Eff);
    }
  }
}
