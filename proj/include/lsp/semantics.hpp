#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lsp/program.hpp"

namespace lsp {

enum class Label : std::uint8_t { Internal, External };

inline const char* label_name(Label l) { return l == Label::Internal ? "i" : "e"; }

struct Config {
  Prog prog;  // null: the empty program
  State state;
};

bool same_config(const Config& a, const Config& b);

struct ConfigHash {
  std::size_t operator()(const Config& c) const {
    std::size_t h = c.prog ? c.prog->hash : 0x2545;
    hash_combine(h, hash_state(c.state));
    return h;
  }
};

struct ConfigEq {
  bool operator()(const Config& a, const Config& b) const { return same_config(a, b); }
};

// Counts explored configurations across every graph of one check.
struct Budget {
  std::size_t limit = 1000000;
  std::size_t used = 0;
  void charge(std::size_t n = 1) {
    used += n;
    if (used > limit) throw ResourceError("configuration budget of " + std::to_string(limit) + " exceeded");
  }
};

// Internal transitions. An await with a true test runs its body in isolation;
// every terminating run gives one step to the empty program, and a body that
// can diverge or block contributes a self-loop.
class Interpreter {
 public:
  explicit Interpreter(const Structure& st, Budget* budget = nullptr) : st_(st), budget_(budget) {}

  std::vector<Config> internal_successors(const Config& c);
  std::vector<Config> internal_successors(const Prog& z, const State& s) { return internal_successors(Config{z, s}); }

  const Structure& structure() const { return st_; }

 private:
  struct AwaitOutcome {
    std::vector<State> finals;
    bool stuck = false;  // a run of the body diverges or blocks
  };

  State assign(const State& s, int var, const Value& v) const;
  const AwaitOutcome& run_await(const Prog& await_stmt, const State& s);

  const Structure& st_;
  Budget* budget_;
  std::unordered_map<Config, AwaitOutcome, ConfigHash, ConfigEq> await_memo_;
};

// Environment moves: states agreeing with the current one on everything but
// `mutable_vars`, related to it by `rely`. Stuttering is left out.
struct EnvModel {
  ExprPtr rely;
  std::vector<int> mutable_vars;
};

// Drops from `candidates` the variables that `rely` pins with a top-level
// v = ~v conjunct.
std::vector<int> env_mutable_vars(const ExprPtr& rely, const std::vector<int>& candidates);

std::vector<State> external_successors(const State& s, const EnvModel& env, const Structure& st);

struct Edge {
  std::uint32_t from;
  std::uint32_t to;
  Label label;
};

struct ConfigGraph {
  std::vector<Config> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> out;  // edge indices per node
  std::vector<std::int64_t> parent;             // BFS tree edge, -1 at the root
  // Set when expanding a node raised an evaluation error; exploration stops.
  std::optional<std::uint32_t> error_node;
  std::string error_message;

  bool terminal(std::uint32_t n) const { return !nodes[n].prog; }
  bool blocked(std::uint32_t n) const;
  // Edge indices from the root to `n`.
  std::vector<std::uint32_t> path_to(std::uint32_t n) const;
};

ConfigGraph build_config_graph(const Prog& z, const State& s0, const EnvModel& env, Interpreter& interp,
                               Budget& budget);

// Graphviz text for a graph; states are shown over `vars`.
std::string to_dot(const ConfigGraph& g, const Structure& st, const std::vector<int>& vars);

}  // namespace lsp
