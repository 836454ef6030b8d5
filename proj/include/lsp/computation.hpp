#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lsp/semantics.hpp"

namespace lsp {

// A finite prefix of a computation: configs.size() == labels.size() + 1.
struct Computation {
  std::vector<Config> configs;
  std::vector<Label> labels;

  std::size_t length() const { return configs.size(); }
};

enum class CompKind { Terminated, Deadlocked, Prefix };

// Equal length, equal states, never internal on both sides at one index.
bool compatible(const Computation& a, const Computation& b, std::string* why = nullptr);

// Merges two compatible computations of z1 and z2 into one of {z1 || z2}.
// Throws InputError with the offending index when they are not compatible.
Computation compose_computations(const Computation& a, const Computation& b);

// Splits a computation of {z1 || z2} into computations of z1 and z2.
std::pair<Computation, Computation> decompose_computation(const Computation& c, Interpreter& interp);

// Checks that every step is a legal transition: internal steps among the
// internal successors, external steps keep the program and respect `hid`.
// Returns a description of the first illegal step, if any.
std::optional<std::string> illegal_step(const Computation& c, Interpreter& interp, const std::set<int>& hid);

CompKind classify(const Computation& c, Interpreter& interp);

}  // namespace lsp
