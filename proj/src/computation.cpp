#include "lsp/computation.hpp"

namespace lsp {

bool compatible(const Computation& a, const Computation& b, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (a.configs.size() != b.configs.size()) return fail("lengths differ");
  if (a.labels.size() + 1 != a.configs.size() || b.labels.size() + 1 != b.configs.size())
    return fail("label count does not match configuration count");
  for (std::size_t k = 0; k < a.configs.size(); ++k)
    if (!(a.configs[k].state == b.configs[k].state)) return fail("states differ at index " + std::to_string(k));
  for (std::size_t k = 0; k < a.labels.size(); ++k)
    if (a.labels[k] == Label::Internal && b.labels[k] == Label::Internal)
      return fail("both sides internal at step " + std::to_string(k));
  return true;
}

namespace {

Prog join(const Prog& a, const Prog& b) {
  if (!a) return b;
  if (!b) return a;
  return mk_par(a, b);
}

bool steps_to(Interpreter& interp, const Config& from, const Config& to) {
  for (const auto& n : interp.internal_successors(from))
    if (same_config(n, to)) return true;
  return false;
}

}  // namespace

Computation compose_computations(const Computation& a, const Computation& b) {
  std::string why;
  if (!compatible(a, b, &why)) throw InputError("computations are not compatible: " + why);
  Computation out;
  for (std::size_t k = 0; k < a.configs.size(); ++k)
    out.configs.push_back({join(a.configs[k].prog, b.configs[k].prog), a.configs[k].state});
  for (std::size_t k = 0; k < a.labels.size(); ++k)
    out.labels.push_back(a.labels[k] == Label::External && b.labels[k] == Label::External ? Label::External
                                                                                          : Label::Internal);
  return out;
}

std::pair<Computation, Computation> decompose_computation(const Computation& c, Interpreter& interp) {
  if (c.configs.empty() || !c.configs[0].prog || c.configs[0].prog->kind != Stmt::Kind::Par)
    throw InputError("decomposition needs a computation of a parallel program");
  Computation left, right;
  const State& s0 = c.configs[0].state;
  left.configs.push_back({c.configs[0].prog->first, s0});
  right.configs.push_back({c.configs[0].prog->second, s0});
  for (std::size_t k = 1; k < c.configs.size(); ++k) {
    const Prog& l = left.configs.back().prog;
    const Prog& r = right.configs.back().prog;
    const Prog& t = c.configs[k].prog;
    const State& s = c.configs[k].state;
    auto push = [&](Prog lp, Label ll, Prog rp, Label rl) {
      left.configs.push_back({std::move(lp), s});
      left.labels.push_back(ll);
      right.configs.push_back({std::move(rp), s});
      right.labels.push_back(rl);
    };
    if (c.labels[k - 1] == Label::External) {
      push(l, Label::External, r, Label::External);
    } else if (!l) {
      push(nullptr, Label::External, t, Label::Internal);
    } else if (!r) {
      push(t, Label::Internal, nullptr, Label::External);
    } else {
      const State& prev = c.configs[k - 1].state;
      const bool left_done = same_program(t, r) && steps_to(interp, {l, prev}, {nullptr, s});
      const bool right_done = same_program(t, l) && steps_to(interp, {r, prev}, {nullptr, s});
      if (left_done) {
        push(nullptr, Label::Internal, r, Label::External);
      } else if (right_done) {
        push(l, Label::External, nullptr, Label::Internal);
      } else if (t && t->kind == Stmt::Kind::Par && same_program(t->second, r) &&
                 steps_to(interp, {l, prev}, {t->first, s})) {
        push(t->first, Label::Internal, r, Label::External);
      } else if (t && t->kind == Stmt::Kind::Par && same_program(t->first, l) &&
                 steps_to(interp, {r, prev}, {t->second, s})) {
        push(l, Label::External, t->second, Label::Internal);
      } else {
        throw InputError("step " + std::to_string(k - 1) + " is not a move of either parallel component");
      }
    }
  }
  return {left, right};
}

std::optional<std::string> illegal_step(const Computation& c, Interpreter& interp, const std::set<int>& hid) {
  if (c.labels.size() + 1 != c.configs.size()) return "label count does not match configuration count";
  for (std::size_t k = 0; k < c.labels.size(); ++k) {
    const Config& from = c.configs[k];
    const Config& to = c.configs[k + 1];
    if (c.labels[k] == Label::Internal) {
      if (!steps_to(interp, from, to)) return "step " + std::to_string(k) + " is not an internal transition";
    } else {
      if (!same_program(from.prog, to.prog)) return "external step " + std::to_string(k) + " changes the program";
      for (int v : hid)
        if (!(from.state[static_cast<std::size_t>(v)] == to.state[static_cast<std::size_t>(v)]))
          return "external step " + std::to_string(k) + " changes a hidden variable";
    }
  }
  return std::nullopt;
}

CompKind classify(const Computation& c, Interpreter& interp) {
  const Config& last = c.configs.back();
  if (!interp.internal_successors(last).empty()) return CompKind::Prefix;
  return last.prog ? CompKind::Deadlocked : CompKind::Terminated;
}

}  // namespace lsp
