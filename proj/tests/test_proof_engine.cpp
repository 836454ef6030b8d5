#include <doctest.h>

#include "support.hpp"

using namespace lsp;

namespace {

ProofReport prove(const SourceFile& f, bool basic = false) {
  REQUIRE(f.proof);
  ProofOptions opts;
  opts.basic_only = basic;
  return check_proof_tree(*f.proof, *f.st, opts);
}

bool mentions(const ProofReport& r, const std::string& text) {
  for (const auto& i : r.issues)
    if (i.message.find(text) != std::string::npos) return true;
  return false;
}

const char* kBuffer =
    "sort Sym = enum {A, B};\n"
    "var buff : seq Sym max 3;\n"
    "var done : bool;\n"
    "program { buff := [A] ++ buff }\n"
    "spec { glo buff; aux done; pre not done and #buff < 3; rely done = ~done and (#~buff < 3 => #buff < 3);\n"
    "  wait false; guar (buff = ~buff and done = ~done) or (buff = [A] ++ ~buff and not ~done and done); eff done; }\n"
    "spec Wide { glo buff, done; pre not done and #buff < 3; rely done = ~done and (#~buff < 3 => #buff < 3);\n"
    "  wait false; guar (buff = ~buff and done = ~done) or (buff = [A] ++ ~buff and not ~done and done); eff done; }\n";

}  // namespace

TEST_CASE("corpus proofs") {
  struct Case {
    const char* file;
    std::size_t depth;
  };
  for (Case c : {Case{"skip_rule.lsp", 2}, Case{"assignment_rule.lsp", 2}, Case{"while_rule.lsp", 4},
                 Case{"parallel_rule.lsp", 4}, Case{"await_rule.lsp", 3}}) {
    CAPTURE(c.file);
    SourceFile f = parse_file(testing::corpus(c.file));
    ProofReport r = prove(f);
    CHECK(r.valid);
    CHECK(r.issues.empty());
    CHECK(r.depth == c.depth);
    CHECK(proof_depth(*f.proof) == c.depth);
    // everything here is a basic derivation
    CHECK(prove(f, true).valid);
    // and the conclusion agrees with the checker
    CHECK(testing::check_file(f).verdict == Verdict::Valid);
  }
}

TEST_CASE("the while proof discharges a well-foundedness obligation") {
  SourceFile f = parse_file(testing::corpus("while_rule.lsp"));
  const ProofNode& loop = *f.proof->premises.at(0);
  REQUIRE(loop.rule == Rule::While);
  RuleCheck rc = validate_rule_instance(loop, *f.st);
  CHECK(rc.ok);
  bool wf = false;
  for (const auto& ob : rc.obligations) wf = wf || ob.kind == Obligation::Kind::WellFounded;
  CHECK(wf);
}

TEST_CASE("failed obligations") {
  SourceFile f = parse_file(testing::corpus("adaptation_gap_consequence.lsp"));
  ProofReport r = prove(f);
  CHECK_FALSE(r.valid);
  CHECK(proof_verdict(r) == Verdict::Invalid);
  const ProofIssue* failed = nullptr;
  for (const auto& i : r.issues)
    if (i.obligation) failed = &i;
  REQUIRE(failed);
  // the exported obligation is a standalone file whose assertion fails too
  SourceFile ex = parse_source(export_obligation(*failed->obligation, *f.st), "obligation.lsp");
  REQUIRE(ex.assertions.size() == 1);
  CHECK_FALSE(valid(ex.assertions[0].formula, *ex.st));
  // the strong spec in the same file holds
  CHECK(testing::check_file(f).verdict == Verdict::Valid);
}

TEST_CASE("schema mismatches") {
  CHECK(mentions(prove(parse_file(testing::corpus("adaptation_gap_global.lsp"))), "exactly the new global variable"));
  CHECK(mentions(prove(parse_file(testing::corpus("lsps_while_curly.lsp"))), "only applies to square-bracket"));

  SUBCASE("skip rule with a different eff") {
    SourceFile f = parse_source(
        "var v : 0..3;\nprogram { skip }\n"
        "spec { glo v; pre true; rely v = ~v; wait false; guar v = ~v; eff v >= ~v; }\n"
        "proof { skip { } }\n");
    CHECK_FALSE(prove(f).valid);
  }
  SUBCASE("wrong program in a premise") {
    SourceFile f = parse_source(
        "var v : 0..3;\nprogram { v := 1; v := 2 }\n"
        "spec { glo v; pre true; rely v = ~v; wait false; guar true; eff v = 2; }\n"
        "spec S { glo v; pre true; rely v = ~v; wait false; guar true; eff true; }\n"
        "proof { sequential { checked { sat (v := 2) S; } checked { sat (v := 2) main; } } }\n");
    CHECK_FALSE(prove(f).valid);
  }
  SUBCASE("unknown rule") {
    CHECK_THROWS_AS(parse_source("var v : 0..3;\nprogram { skip }\n"
                                 "spec { glo v; pre true; rely I; wait false; guar true; eff true; }\n"
                                 "proof { nosuch { } }\n"),
                    InputError);
  }
}

TEST_CASE("checked leaves are model checked") {
  SourceFile f = parse_source(
      "var v : 0..3;\nprogram { v := v + 1 }\n"
      "spec { glo v; pre v < 3; rely v = ~v; wait false; guar true; eff v = ~v; }\n"
      "proof { checked { } }\n");
  ProofReport r = prove(f);
  CHECK_FALSE(r.valid);
  CHECK(r.checked_leaves == 1);
}

TEST_CASE("introduction needs a removal and is not basic") {
  std::string proof = std::string(kBuffer) +
                      "proof { introduction { checked { sat (await true do done := true; buff := [A] ++ buff od) "
                      "Wide; } } }\n";
  SourceFile f = parse_source(proof);
  CHECK(prove(f).valid);
  ProofReport basic = prove(f, true);
  CHECK_FALSE(basic.valid);
  CHECK(mentions(basic, "not a basic rule"));

  // a premise program that does not erase to the conclusion's
  std::string wrong = std::string(kBuffer) +
                      "proof { introduction { checked { sat (await true do done := true; buff := [B] ++ buff od) "
                      "Wide; } } }\n";
  CHECK(mentions(prove(parse_source(wrong)), "removal does not hold"));
}

TEST_CASE("dining philosophers") {
  SourceFile f = parse_file(testing::corpus("dining_philosophers.lsp"));
  ProofReport r = prove(f);
  CHECK(r.valid);
  CHECK(r.depth == 3);
  CHECK(r.checked_leaves == 3);
}

TEST_CASE("proof reports render") {
  SourceFile f = parse_file(testing::corpus("skip_rule.lsp"));
  ProofReport r = prove(f);
  CHECK(render_proof_text(r).find("valid") != std::string::npos);
  CHECK(render_proof_json(r).find("\"valid\"") != std::string::npos);
}
