#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lsp/expr.hpp"

namespace lsp {

struct SourceLoc {
  int line = 0;
  int col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct Stmt;
// Null stands for the empty program.
using Prog = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind { Skip, Assign, Block, Seq, If, While, Par, Await };
  Kind kind = Kind::Skip;
  int var = -1;          // assignment target
  ExprPtr expr;          // right-hand side or test
  std::vector<int> decls;
  Prog first, second;    // sub-programs
  SourceLoc loc;         // not part of program identity
  std::size_t hash = 0;
};

Prog mk_skip(SourceLoc loc = {});
Prog mk_assign(int var, ExprPtr rhs, SourceLoc loc = {});
Prog mk_block(std::vector<int> decls, Prog body, SourceLoc loc = {});
Prog mk_seq(Prog a, Prog b, SourceLoc loc = {});
Prog mk_if(ExprPtr test, Prog then_branch, Prog else_branch, SourceLoc loc = {});
Prog mk_while(ExprPtr test, Prog body, SourceLoc loc = {});
Prog mk_par(Prog a, Prog b, SourceLoc loc = {});
Prog mk_await(ExprPtr test, Prog body, SourceLoc loc = {});
// Right-nested sequence of a non-empty list.
Prog mk_seq_list(const std::vector<Prog>& parts);

bool same_program(const Prog& a, const Prog& b);
std::string to_string(const Prog& p, const Structure& st, int indent = 0);

// Unhooked variables occurring in the program.
std::set<int> free_vars(const Prog& p);
// Variables declared in blocks.
std::set<int> declared_vars(const Prog& p);
// Occurring variables that are not declared.
std::set<int> global_vars(const Prog& p);
// Declared variables plus variables of If/While tests (await tests excluded).
std::set<int> hid_set(const Prog& p);

struct Violation {
  std::string constraint;  // assignment-sort, scope, init-before-read, boolean-test, unknown-variable
  SourceLoc loc;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<std::string> notes;  // non-fatal observations
  bool ok() const { return violations.empty(); }
};

ValidationResult validate_program(const Prog& p, const Structure& st);

// True iff `augmented` is related to `plain` by the auxiliary removal
// relation for global variables `glo` and auxiliary variables `aux`.
// On failure `why` describes the first mismatch.
bool check_removal(const Prog& augmented, const std::vector<int>& glo, const std::vector<int>& aux,
                   const Prog& plain, std::string* why = nullptr);

// Deletes assignments to `aux` variables and unwraps the auxiliary wrappers.
Prog erase_auxiliary(const Prog& augmented, const std::vector<int>& aux);

}  // namespace lsp
