#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsp/proof.hpp"

namespace lsp {

struct NamedSpec {
  Specification spec;
  Bracket bracket = Bracket::Curly;
};

struct Assertion {
  bool wf = false;  // `assert wf R;` rather than validity
  ExprPtr formula;
  SourceLoc loc;
};

// One input file: declarations plus at most one specified program with its
// optional witness, invariant and proof.
struct SourceFile {
  std::string name;
  std::shared_ptr<Structure> st;
  std::map<std::string, Prog> procs;
  std::map<std::string, ExprPtr> lets;
  std::map<std::string, NamedSpec> specs;
  Prog program;
  std::optional<NamedSpec> spec;
  Prog witness;
  ExprPtr invariant;
  std::vector<Assertion> assertions;
  ProofPtr proof;

  bool has_specified_program() const { return program && spec; }
  SpecifiedProgram specified_program() const;
};

// Throws InputError carrying "name:line:col: message".
SourceFile parse_source(const std::string& text, const std::string& name = "<input>");
SourceFile parse_file(const std::string& path);

// Parses a program or an expression against an existing structure.
Prog parse_program(const std::string& text, Structure& st);
ExprPtr parse_expression(const std::string& text, Structure& st);

}  // namespace lsp
