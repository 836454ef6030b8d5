#pragma once

#include <string>

#include "lsp/report.hpp"

#ifndef LSP_CORPUS_DIR
#define LSP_CORPUS_DIR "corpus"
#endif

namespace testing {

inline std::string corpus(const std::string& name) { return std::string(LSP_CORPUS_DIR) + "/" + name; }

inline lsp::ExprPtr expr(lsp::SourceFile& f, const std::string& text) { return lsp::parse_expression(text, *f.st); }
inline lsp::Prog prog(lsp::SourceFile& f, const std::string& text) { return lsp::parse_program(text, *f.st); }

inline int var(const lsp::SourceFile& f, const std::string& name) { return *f.st->find_var(name); }

// Checks the file's specified program the way the `check` command does.
inline lsp::CheckReport check_file(const lsp::SourceFile& f, std::size_t budget = 1000000) {
  lsp::CheckOptions opts;
  opts.budget = budget;
  opts.invariant = f.invariant;
  lsp::SpecifiedProgram sp = f.specified_program();
  return lsp::check_specified(sp, f.witness ? &f.witness : nullptr, *f.st, opts);
}

// A specification over `glo` with the five conditions given as text.
inline lsp::Specification spec(lsp::SourceFile& f, const std::vector<std::string>& glo, const std::string& pre,
                               const std::string& rely, const std::string& wait, const std::string& guar,
                               const std::string& eff, const std::vector<std::string>& aux = {}) {
  lsp::Specification s;
  for (const auto& g : glo) s.glo.push_back(var(f, g));
  for (const auto& a : aux) s.aux.push_back(var(f, a));
  s.pre = expr(f, pre);
  s.rely = expr(f, rely);
  s.wait = expr(f, wait);
  s.guar = expr(f, guar);
  s.eff = expr(f, eff);
  return s;
}

}  // namespace testing
