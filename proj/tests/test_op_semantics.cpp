#include <doctest.h>

#include "support.hpp"

using namespace lsp;
using testing::expr;
using testing::prog;
using testing::var;

namespace {

SourceFile decls() { return parse_source("var v, w : 0..20;\nvar t1, t2 : 0..3;\nvar b : bool;\n"); }

State with(const SourceFile& f, State s, const char* n, std::int64_t x) {
  s[static_cast<std::size_t>(var(f, n))] = Value::integer(x);
  return s;
}

}  // namespace

TEST_CASE("internal transitions") {
  SourceFile f = decls();
  Interpreter in(*f.st);
  State s = f.st->default_state();

  auto skip = in.internal_successors(prog(f, "skip"), s);
  REQUIRE(skip.size() == 1);
  CHECK_FALSE(skip[0].prog);

  auto asg = in.internal_successors(prog(f, "v := v + 3; w := v"), s);
  REQUIRE(asg.size() == 1);
  CHECK(asg[0].state[static_cast<std::size_t>(var(f, "v"))] == Value::integer(3));
  CHECK(same_program(asg[0].prog, prog(f, "w := v")));

  CHECK(in.internal_successors(prog(f, "await b do skip od"), s).empty());

  // a body that loops forever gives a self-loop
  Prog diverge = prog(f, "await true do begin loc b; b := true; while b do skip od end od");
  auto loop = in.internal_successors(diverge, s);
  REQUIRE(loop.size() == 1);
  CHECK(same_program(loop[0].prog, diverge));
  CHECK(loop[0].state == s);

  // an enabled await runs its body atomically
  auto atomic = in.internal_successors(prog(f, "await true do v := 1; v := v + 1; w := v od"), s);
  REQUIRE(atomic.size() == 1);
  CHECK_FALSE(atomic[0].prog);
  CHECK(atomic[0].state[static_cast<std::size_t>(var(f, "w"))] == Value::integer(2));
}

TEST_CASE("determinism outside parallel composition") {
  SourceFile f = decls();
  Interpreter in(*f.st);
  for (const char* t : {"v := 1; w := 2", "if b then v := 1 else v := 2 fi", "while v < 3 do v := v + 1 od",
                        "begin loc w; w := 1; v := w end", "await true do v := 2 od"}) {
    Prog p = prog(f, t);
    for_each_assignment(*f.st, {var(f, "v"), var(f, "b")}, f.st->default_state(), [&](const State& s) {
      CHECK(in.internal_successors(p, s).size() <= 1);
      return true;
    });
  }
  auto par = in.internal_successors(prog(f, "{ v := 1 || v := 2 }"), f.st->default_state());
  CHECK(par.size() == 2);
}

TEST_CASE("environment moves") {
  SourceFile f = decls();
  int v = var(f, "v");
  EnvModel env{expr(f, "v >= ~v"), {v}};
  State s = with(f, f.st->default_state(), "v", 18);
  auto next = external_successors(s, env, *f.st);
  CHECK(next.size() == 2);
  CHECK(env_mutable_vars(expr(f, "v = ~v and w >= ~w"), {v, var(f, "w")}) == std::vector<int>{var(f, "w")});
}

TEST_CASE("configuration graphs") {
  SourceFile f = parse_source("var v : 0..1;\nvar u : 0..6;\n");
  Budget budget;
  Interpreter in(*f.st, &budget);
  SUBCASE("skip under identity") {
    EnvModel env{expr(f, "v = ~v"), {}};
    ConfigGraph g = build_config_graph(prog(f, "skip"), f.st->default_state(), env, in, budget);
    CHECK(g.nodes.size() == 2);
    CHECK(g.edges.size() == 1);
    CHECK(g.terminal(1));
  }
  SUBCASE("two assignments give three residues") {
    EnvModel env{expr(f, "u = ~u"), {}};
    ConfigGraph g = build_config_graph(prog(f, "u := u + 1; u := u + 2"), f.st->default_state(), env, in, budget);
    CHECK(g.nodes.size() == 3);
  }
  SUBCASE("environment edges satisfy the rely and blocked nodes have no internal edge") {
    int u = var(f, "u");
    EnvModel env{expr(f, "u >= ~u"), {u}};
    ConfigGraph g =
        build_config_graph(prog(f, "await u > 4 do u := 0 od"), f.st->default_state(), env, in, budget);
    for (const auto& e : g.edges) {
      if (e.label == Label::External) {
        CHECK(holds(env.rely, *f.st, g.nodes[e.from].state, g.nodes[e.to].state));
        CHECK(same_program(g.nodes[e.from].prog, g.nodes[e.to].prog));
      }
    }
    for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
      bool has_internal = false;
      for (auto e : g.out[n]) has_internal = has_internal || g.edges[e].label == Label::Internal;
      CHECK(g.blocked(n) == (!has_internal && !g.terminal(n)));
    }
    CHECK(to_dot(g, *f.st, {u}).find("digraph") != std::string::npos);
  }
  SUBCASE("budget") {
    Budget tiny;
    tiny.limit = 2;
    EnvModel env{expr(f, "u >= ~u"), {var(f, "u")}};
    CHECK_THROWS_AS(build_config_graph(prog(f, "while true do skip od"), f.st->default_state(), env, in, tiny),
                    ResourceError);
  }
}

// z1 = v := v + t1; w := v and z2 = v := v + t2.
TEST_CASE("decomposition of the seven-configuration computation") {
  SourceFile f = decls();
  Interpreter in(*f.st);
  Prog z3 = prog(f, "w := v");
  Prog z1 = prog(f, "v := v + t1; w := v");
  Prog z2 = prog(f, "v := v + t2");
  Prog par = mk_par(z1, z2);
  State s1 = with(f, with(f, f.st->default_state(), "t1", 1), "t2", 2);
  State s2 = with(f, s1, "v", 3);
  State s3 = with(f, s2, "v", 5);
  State s4 = with(f, s3, "v", 6);
  State s5 = with(f, s4, "v", 7);
  State s6 = with(f, s5, "v", 8);
  State s7 = with(f, s6, "w", 8);
  using L = Label;
  Computation c{{{par, s1}, {par, s2}, {z1, s3}, {z1, s4}, {z1, s5}, {z3, s6}, {nullptr, s7}},
                {L::External, L::Internal, L::External, L::External, L::Internal, L::Internal}};
  CHECK_FALSE(illegal_step(c, in, hid_set(par)));
  auto [a, b] = decompose_computation(c, in);
  CHECK(a.labels == std::vector<L>{L::External, L::External, L::External, L::External, L::Internal, L::Internal});
  CHECK(b.labels == std::vector<L>{L::External, L::Internal, L::External, L::External, L::External, L::External});
  for (std::size_t k = 0; k < 5; ++k) CHECK(same_program(a.configs[k].prog, z1));
  CHECK(same_program(a.configs[5].prog, z3));
  CHECK(same_program(b.configs[1].prog, z2));
  for (std::size_t k = 2; k < 7; ++k) CHECK_FALSE(b.configs[k].prog);
  CHECK_FALSE(illegal_step(a, in, hid_set(z1)));
  CHECK_FALSE(illegal_step(b, in, hid_set(z2)));
  Computation back = compose_computations(a, b);
  REQUIRE(back.length() == c.length());
  for (std::size_t k = 0; k < c.length(); ++k) CHECK(same_config(back.configs[k], c.configs[k]));
  CHECK(back.labels == c.labels);
  CHECK(classify(c, in) == CompKind::Terminated);
}

TEST_CASE("composition of the compatible pair") {
  SourceFile f = decls();
  Interpreter in(*f.st);
  Prog z3 = prog(f, "w := v");
  Prog z1 = prog(f, "v := v + t1; w := v");
  Prog z2 = prog(f, "v := v + t2");
  State s1 = with(f, with(f, f.st->default_state(), "t1", 1), "t2", 2);
  State s2 = with(f, s1, "v", 1);
  State s3 = with(f, s2, "v", 3);
  State s4 = with(f, s3, "v", 4);
  State s5 = with(f, s4, "w", 4);
  using L = Label;
  Computation a{{{z1, s1}, {z3, s2}, {z3, s3}, {z3, s4}, {nullptr, s5}}, {L::Internal, L::External, L::External, L::Internal}};
  Computation b{{{z2, s1}, {z2, s2}, {nullptr, s3}, {nullptr, s4}, {nullptr, s5}},
                {L::External, L::Internal, L::External, L::External}};
  CHECK(compatible(a, b));
  Computation c = compose_computations(a, b);
  CHECK(same_program(c.configs[0].prog, mk_par(z1, z2)));
  CHECK(same_program(c.configs[1].prog, mk_par(z3, z2)));
  CHECK(same_program(c.configs[2].prog, z3));
  CHECK(c.labels == std::vector<L>{L::Internal, L::Internal, L::External, L::Internal});
  CHECK_FALSE(illegal_step(c, in, hid_set(mk_par(z1, z2))));

  // the first computation of z1 alone is not compatible with anything of z2 of that length
  Computation lone{{{z1, s1}, {z3, s2}, {nullptr, with(f, s2, "w", 1)}}, {L::Internal, L::Internal}};
  Computation other{{{z2, s1}, {z2, s2}, {nullptr, with(f, s2, "w", 1)}}, {L::External, L::Internal}};
  CHECK_FALSE(compatible(lone, other));
  CHECK_THROWS_AS(compose_computations(lone, other), InputError);
}

TEST_CASE("all-external computations") {
  SourceFile f = decls();
  Interpreter in(*f.st);
  Prog s = prog(f, "skip");
  State s1 = f.st->default_state();
  State s2 = with(f, s1, "v", 4);
  Computation a{{{s, s1}, {s, s2}}, {Label::External}};
  Computation c = compose_computations(a, a);
  CHECK(c.labels == std::vector<Label>{Label::External});
  auto [l, r] = decompose_computation(c, in);
  CHECK(l.labels == std::vector<Label>{Label::External});
  CHECK(r.labels == std::vector<Label>{Label::External});
}

TEST_CASE("illegal steps are reported") {
  SourceFile f = decls();
  Interpreter in(*f.st);
  Prog z = prog(f, "v := v + 1");
  State s1 = f.st->default_state();
  Computation bad{{{z, s1}, {nullptr, with(f, s1, "v", 2)}}, {Label::Internal}};
  CHECK(illegal_step(bad, in, {}));
  // an external step may not touch a hidden variable
  Computation hid{{{z, s1}, {z, with(f, s1, "v", 1)}}, {Label::External}};
  CHECK(illegal_step(hid, in, {var(f, "v")}));
  CHECK_FALSE(illegal_step(hid, in, {}));
}
