#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsp/checker.hpp"

namespace lsp {

enum class Rule {
  Consequence,
  Pre,
  Access,
  Skip,
  Assignment,
  Block,
  Sequential,
  If,
  While,
  Parallel,
  ParallelGeneral,
  Await,
  Elimination,
  Effect,
  Global,
  Auxiliary,
  Introduction,
  LspsWhile,
  LspsAwait,
  // Leaf discharged by the model checker instead of a derivation.
  Checked,
};

const char* rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& name);

struct Obligation {
  enum class Kind { Valid, WellFounded };
  Kind kind = Kind::Valid;
  ExprPtr formula;
  std::string origin;
};

struct RemovalLeaf {
  Prog augmented;
  std::vector<int> glo;
  std::vector<int> aux;
  Prog plain;
};

struct ProofNode;
using ProofPtr = std::shared_ptr<ProofNode>;

struct ProofNode {
  SpecifiedProgram conclusion;
  Rule rule = Rule::Checked;
  std::vector<ProofPtr> premises;
  // Auxiliary updates a := u of the assignment and await rules; auxiliary
  // variables not listed keep their value.
  std::vector<std::pair<int, ExprPtr>> aux_updates;
  // Variable named by access, elimination, global and auxiliary.
  std::optional<int> variable;
  // Augmented program for checked leaves with auxiliary variables.
  Prog witness;
  SourceLoc loc;
};

struct RuleCheck {
  bool ok = true;
  std::string error;
  std::vector<Obligation> obligations;
  std::optional<RemovalLeaf> removal;
};

// Matches one node against its rule schema. Returns the obligations the
// schema leaves open; schema mismatches and side-condition failures are
// reported in `error`.
RuleCheck validate_rule_instance(const ProofNode& node, const Structure& st);

struct Discharge {
  bool ok = false;
  bool resource = false;
  std::string detail;
};

Discharge discharge_obligation(const Obligation& ob, const Structure& st);

struct ProofIssue {
  std::string where;  // rule path from the root
  std::string message;
  std::optional<Obligation> obligation;  // set for failed obligations
};

struct ProofOptions {
  bool basic_only = false;  // LSP_B: no removals, no introduction
  std::size_t budget = 1000000;
};

struct ProofReport {
  bool valid = true;
  bool resource = false;
  std::size_t depth = 0;
  std::size_t nodes = 0;
  std::size_t obligations = 0;
  std::size_t checked_leaves = 0;
  std::vector<ProofIssue> issues;
};

ProofReport check_proof_tree(const ProofNode& root, const Structure& st, const ProofOptions& opts = {});

// Proof depth: obligations and removals count 0, a node one more than its
// deepest sub-derivation.
std::size_t proof_depth(const ProofNode& node);

}  // namespace lsp
