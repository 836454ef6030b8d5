#pragma once

#include <string>

#include "lsp/parser.hpp"

namespace lsp {

enum ExitCode { kExitValid = 0, kExitInvalid = 1, kExitInput = 2, kExitResource = 3 };

int exit_code(Verdict v);

// Human-readable and JSON renderings of the same report; both carry the
// verdict, the clause and the counterexample length.
std::string render_check_text(const CheckReport& r, const SpecifiedProgram& sp, const Structure& st);
std::string render_check_json(const CheckReport& r, const SpecifiedProgram& sp, const Structure& st);

Verdict proof_verdict(const ProofReport& r);
std::string render_proof_text(const ProofReport& r);
std::string render_proof_json(const ProofReport& r);

std::string render_relation_text(const StateRelation& r, const Structure& st);
std::string render_set_text(const StateSet& s, const Structure& st);
std::string render_relation_json(const StateRelation& r, const Structure& st);
std::string render_set_json(const StateSet& s, const Structure& st);

// For relations over integer variables only: the disjunction of
// v = ~v + k shapes, one disjunct per distinct offset vector. Empty when the
// relation has other kinds of variables.
std::string offset_summary(const StateRelation& r, const Structure& st);

// Standalone file re-checkable with `check`: declarations plus one assert.
std::string export_obligation(const Obligation& ob, const Structure& st);

}  // namespace lsp
