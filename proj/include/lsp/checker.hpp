#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsp/computation.hpp"
#include "lsp/relations.hpp"

namespace lsp {

enum class Bracket { Curly, Square };

struct Specification {
  std::vector<int> glo;
  std::vector<int> aux;
  ExprPtr pre, rely, wait, guar, eff;
};

struct SpecifiedProgram {
  Prog program;
  Specification spec;
  Bracket bracket = Bracket::Curly;
};

// Sorted union of the global and auxiliary sets.
std::vector<int> spec_scope(const Specification& s);

// Replaces identity frames by their expansion over the specification scope.
Specification expand_frames(const Specification& s, const Structure& st);

// Well-formedness of a specification; throws InputError. Relation
// properties of rely and guar are checked by enumeration.
void validate_specification(const Specification& s, const Structure& st, bool check_relations = true);
// Adds the conditions tying the program to the variable sets and the
// program's own well-formedness.
void validate_specified_program(const SpecifiedProgram& sp, const Structure& st, bool check_relations = true);

enum class Verdict { Valid, Invalid, ResourceExceeded };

enum class Clause { None, Convergence, Guar, Wait, Eff, AuxRemoval, LspsAwaitTermination, Invariant, Evaluation };

const char* verdict_name(Verdict v);
const char* clause_name(Clause c);

struct Counterexample {
  std::vector<Config> configs;
  std::vector<Label> labels;
  // For divergence: index of the configuration where the repeated cycle
  // starts; the last configuration equals that one.
  std::optional<std::size_t> cycle_start;
};

struct CheckStats {
  std::size_t initial_states = 0;
  std::size_t configurations = 0;
  std::size_t edges = 0;
};

struct CheckReport {
  Verdict verdict = Verdict::Valid;
  Clause clause = Clause::None;
  std::string detail;
  std::optional<Counterexample> counterexample;
  CheckStats stats;
  std::vector<std::string> notes;
};

struct CheckOptions {
  std::size_t budget = 1000000;
  // Extra assertion required at every reachable configuration.
  ExprPtr invariant;
};

CheckReport check_sat_noaux(const SpecifiedProgram& sp, const Structure& st, const CheckOptions& opts = {});
CheckReport check_sat_general(const SpecifiedProgram& sp, const Prog& witness, const Structure& st,
                              const CheckOptions& opts = {});
CheckReport check_sat_modified(const SpecifiedProgram& sp, const Prog* witness, const Structure& st,
                               const CheckOptions& opts = {});
// Dispatches on the bracket and on whether auxiliary variables are present.
CheckReport check_specified(const SpecifiedProgram& sp, const Prog* witness, const Structure& st,
                            const CheckOptions& opts = {});

// Re-runs a counterexample through the transition relation. Returns a
// description of the first edge that does not replay.
std::optional<std::string> replay(const Counterexample& cex, const SpecifiedProgram& sp, const Prog& run_program,
                                  const Structure& st);

struct Strongest {
  StateRelation eff;
  StateSet wait;
  StateRelation guar;
};

// Least eff/wait/guar relations of z under P and R, projected onto `glo`.
Strongest strongest_relations(const Prog& z, const std::vector<int>& glo, const ExprPtr& pre, const ExprPtr& rely,
                              const Structure& st, std::size_t budget = 1000000);

}  // namespace lsp
