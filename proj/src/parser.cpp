#include "lsp/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace lsp {

SpecifiedProgram SourceFile::specified_program() const {
  if (!program) throw InputError(name + ": no program section");
  if (!spec) throw InputError(name + ": no specification section");
  return SpecifiedProgram{program, spec->spec, spec->bracket};
}

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  SourceLoc loc;
  std::size_t begin = 0, end = 0;
};

const char* const kPunct[] = {"<=>", ":=", "||", "..", "=>", "<=", ">=", "!=", "++", "{", "}", "[", "]", "(", ")",
                              ";",   ",",  ":",  ".",  "=",  "<",  ">",  "+",  "-",  "*",  "/", "%", "#", "\\", "|",
                              "~",   "@"};

std::vector<Token> lex(const std::string& text, const std::string& name) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto error = [&](const std::string& msg) {
    throw InputError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  };
  while (i < text.size()) {
    char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (text.compare(i, 2, "//") == 0) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (text.compare(i, 2, "/*") == 0) {
      auto close = text.find("*/", i + 2);
      if (close == std::string::npos) error("unterminated comment");
      advance(close + 2 - i);
      continue;
    }
    Token t;
    t.loc = {line, col};
    t.begin = i;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (text.compare(i, 3, "\xE2\x86\xBC") == 0) {  // left harpoon
      t.kind = Token::Kind::Punct;
      t.text = "~";
      advance(3);
    } else {
      bool matched = false;
      for (const char* p : kPunct) {
        std::size_t n = std::char_traits<char>::length(p);
        if (text.compare(i, n, p) == 0) {
          t.kind = Token::Kind::Punct;
          t.text = p;
          advance(n);
          matched = true;
          break;
        }
      }
      if (!matched) error(std::string("unexpected character '") + ch + "'");
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.loc = {line, col};
  end.begin = end.end = i;
  out.push_back(end);
  return out;
}

bool reserved(const std::string& s) {
  static const char* const words[] = {"and",   "or",   "not",   "in",   "notin", "subset", "union",  "inter",
                                      "forall", "exists", "true", "false", "skip", "begin", "loc",    "end",
                                      "if",    "then", "else",  "fi",   "while", "do",     "od",     "par",
                                      "await", "I"};
  for (const char* w : words)
    if (s == w) return true;
  return false;
}

class Parser {
 public:
  Parser(const std::string& text, std::string name, std::shared_ptr<Structure> st)
      : toks_(lex(text, name)), name_(std::move(name)), st_(std::move(st)) {}

  SourceFile file() {
    SourceFile f;
    f.name = name_;
    f.st = st_;
    file_ = &f;
    while (!at_end()) top_item(f);
    file_ = nullptr;
    return f;
  }

  Prog program_only() {
    Prog p = stmts();
    expect_end();
    return p;
  }

  ExprPtr expression_only() {
    const Token& t = peek();
    ExprPtr e = typed(expr(), t, false);
    expect_end();
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string name_;
  std::shared_ptr<Structure> st_;
  SourceFile* file_ = nullptr;
  std::vector<std::pair<int, bool>> bound_;  // quantifier binders in scope

  // -- tokens

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void error_at(const Token& t, const std::string& msg) const {
    throw InputError(name_ + ":" + t.loc.str() + ": " + msg);
  }
  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = peek();
    error_at(t, msg + (t.kind == Token::Kind::End ? " at end of input" : " near '" + t.text + "'"));
  }

  bool is(const char* text, std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind != Token::Kind::End && t.kind != Token::Kind::Int && t.text == text;
  }
  bool accept(const char* text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  const Token& expect(const char* text) {
    if (!is(text)) error(std::string("expected '") + text + "'");
    return next();
  }
  void expect_end() {
    if (!at_end()) error("unexpected trailing input");
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Token::Kind::Ident) error(std::string("expected ") + what);
    return next().text;
  }
  std::int64_t integer() {
    bool neg = accept("-");
    if (peek().kind != Token::Kind::Int) error("expected an integer");
    const Token& t = next();
    std::int64_t v;
    try {
      v = std::stoll(t.text);
    } catch (const std::exception&) {
      error_at(t, "integer literal out of range");
    }
    return neg ? -v : v;
  }
  // Identifier possibly containing hyphens written without spaces.
  std::string hyphen_ident() {
    std::string s = ident("rule name");
    while (is("-") && peek().begin == toks_[pos_ - 1].end && peek(1).kind == Token::Kind::Ident &&
           peek(1).begin == peek().end) {
      next();
      s += "-" + next().text;
    }
    return s;
  }

  // -- sorts

  SortPtr sort_expr() {
    if (peek().kind == Token::Kind::Int || is("-")) return range_sort("");
    std::string word = ident("sort");
    if (word == "nat") return range_sort("");
    if (word == "bool") return st_->find_sort("bool");
    if (word == "enum") {
      expect("{");
      std::vector<std::string> lits;
      do lits.push_back(ident("enum literal"));
      while (accept(","));
      expect("}");
      std::string nm = "enum {";
      for (std::size_t i = 0; i < lits.size(); ++i) nm += (i ? ", " : "") + lits[i];
      nm += "}";
      return intern_sort(nm, [&] { return make_enum_sort(nm, lits); });
    }
    if (word == "seq") {
      SortPtr elem = sort_expr();
      if (!(peek().kind == Token::Kind::Ident && peek().text == "max")) error("expected 'max' in sequence sort");
      next();
      std::int64_t n = integer();
      if (n < 0) error("negative sequence bound");
      std::string nm = "seq " + elem->name + " max " + std::to_string(n);
      return intern_sort(nm, [&] { return make_seq_sort(nm, elem, static_cast<std::size_t>(n)); });
    }
    if (word == "set") {
      SortPtr elem = sort_expr();
      std::string nm = "set " + elem->name;
      return intern_sort(nm, [&] { return make_set_sort(nm, elem); });
    }
    SortPtr s = st_->find_sort(word);
    if (!s) error_at(toks_[pos_ - 1], "unknown sort " + word);
    return s;
  }

  template <typename Make>
  SortPtr intern_sort(const std::string& nm, Make make) {
    if (auto s = st_->find_sort(nm)) return s;
    SortPtr s = make();
    st_->add_sort(s);
    return s;
  }

  SortPtr range_sort(const std::string&) {
    std::int64_t lo = integer();
    expect("..");
    std::int64_t hi = integer();
    std::string nm = std::to_string(lo) + ".." + std::to_string(hi);
    return intern_sort(nm, [&] { return make_range_sort(nm, lo, hi); });
  }

  // Named declaration: rebuild the sort under the new name.
  SortPtr rename_sort(const SortPtr& s, const std::string& nm, bool strict) {
    switch (s->kind) {
      case Sort::Kind::Bool:
        if (strict) error("bool sorts cannot be strict");
        {
          auto copy = std::make_shared<Sort>(*s);
          copy->name = nm;
          return copy;
        }
      case Sort::Kind::Range: return make_range_sort(nm, s->lo, s->hi, strict);
      case Sort::Kind::Enum: {
        // The anonymous enum owns the literals; reuse it under the new name.
        auto copy = std::make_shared<Sort>(*s);
        copy->name = nm;
        copy->strict = strict;
        return copy;
      }
      case Sort::Kind::Seq: return make_seq_sort(nm, s->element, s->max_len, strict);
      case Sort::Kind::Set: return make_set_sort(nm, s->element, strict);
    }
    return s;
  }

  // -- top level

  void top_item(SourceFile& f) {
    const Token& start = peek();
    std::string kw = ident("declaration");
    if (kw == "sort") {
      std::string nm = ident("sort name");
      if (st_->find_sort(nm)) error_at(start, "sort declared twice: " + nm);
      expect("=");
      SortPtr s;
      if (is("enum")) {
        next();
        expect("{");
        std::vector<std::string> lits;
        do lits.push_back(ident("enum literal"));
        while (accept(","));
        expect("}");
        bool strict = accept_word("strict");
        s = make_enum_sort(nm, lits, strict);
      } else {
        SortPtr base = sort_expr();
        s = rename_sort(base, nm, accept_word("strict"));
      }
      try {
        st_->add_sort(s);
      } catch (const InputError& e) {
        error_at(start, e.what());
      }
      expect(";");
    } else if (kw == "var") {
      std::vector<std::pair<std::string, Token>> names;
      do {
        const Token& t = peek();
        names.push_back({ident("variable name"), t});
      } while (accept(","));
      expect(":");
      SortPtr s = sort_expr();
      for (const auto& [n, t] : names) {
        if (reserved(n)) error_at(t, n + " is a reserved word");
        if (st_->find_var(n)) error_at(t, "variable declared twice: " + n);
        if (st_->enum_sort_of(intern(n))) error_at(t, n + " is already an enum literal");
        st_->declare_var(n, s);
      }
      expect(";");
    } else if (kw == "let") {
      std::string nm = ident("name");
      if (f.lets.count(nm) || st_->find_var(nm)) error_at(start, "name defined twice: " + nm);
      expect("=");
      f.lets[nm] = typed(expr(), start, false);
      expect(";");
    } else if (kw == "proc") {
      std::string nm = ident("procedure name");
      if (f.procs.count(nm)) error_at(start, "procedure defined twice: " + nm);
      expect("{");
      f.procs[nm] = stmts();
      expect("}");
    } else if (kw == "program") {
      if (f.program) error_at(start, "second program section");
      expect("{");
      f.program = stmts();
      expect("}");
    } else if (kw == "spec") {
      if (peek().kind == Token::Kind::Ident) {
        std::string nm = next().text;
        if (f.specs.count(nm)) error_at(start, "specification defined twice: " + nm);
        f.specs[nm] = spec_body();
      } else {
        if (f.spec) error_at(start, "second unnamed specification");
        f.spec = spec_body();
      }
    } else if (kw == "witness") {
      if (f.witness) error_at(start, "second witness section");
      expect("{");
      f.witness = stmts();
      expect("}");
    } else if (kw == "invariant") {
      if (f.invariant) error_at(start, "second invariant");
      f.invariant = formula();
      expect(";");
    } else if (kw == "assert") {
      Assertion a;
      a.loc = start.loc;
      a.wf = accept_word("wf");
      a.formula = formula();
      f.assertions.push_back(std::move(a));
      expect(";");
    } else if (kw == "proof") {
      if (f.proof) error_at(start, "second proof section");
      expect("{");
      f.proof = proof_node(true);
      expect("}");
    } else {
      error_at(start, "unknown section '" + kw + "'");
    }
  }

  bool accept_word(const char* w) {
    if (peek().kind == Token::Kind::Ident && peek().text == w) {
      next();
      return true;
    }
    return false;
  }

  NamedSpec spec_body() {
    NamedSpec ns;
    bool square = false;
    if (accept("[")) square = true;
    else expect("{");
    ns.bracket = square ? Bracket::Square : Bracket::Curly;
    bool have_glo = false;
    while (!is(square ? "]" : "}")) {
      const Token& t = peek();
      std::string field = ident("specification field");
      if (field == "glo" || field == "aux") {
        std::vector<int>& target = field == "glo" ? ns.spec.glo : ns.spec.aux;
        if (field == "glo") have_glo = true;
        if (!is(";")) {
          do {
            const Token& vt = peek();
            std::string v = ident("variable");
            auto id = st_->find_var(v);
            if (!id) error_at(vt, "unknown variable " + v);
            target.push_back(*id);
          } while (accept(","));
        }
      } else {
        ExprPtr* slot = field == "pre"    ? &ns.spec.pre
                        : field == "rely" ? &ns.spec.rely
                        : field == "wait" ? &ns.spec.wait
                        : field == "guar" ? &ns.spec.guar
                        : field == "eff"  ? &ns.spec.eff
                                          : nullptr;
        if (!slot) error_at(t, "unknown specification field " + field);
        if (*slot) error_at(t, "field " + field + " given twice");
        *slot = formula();
      }
      expect(";");
    }
    next();
    if (!have_glo) error("specification lacks a glo set");
    for (auto [nm, f] : {std::pair{"pre", ns.spec.pre}, {"rely", ns.spec.rely}, {"wait", ns.spec.wait},
                         {"guar", ns.spec.guar}, {"eff", ns.spec.eff}})
      if (!f) error(std::string("specification lacks a ") + nm + " condition");
    return ns;
  }

  // -- proofs

  Prog prog_ref() {
    if (accept("@")) return proc_ref();
    if (accept_word("main")) {
      if (!file_->program) error("no program section before the proof");
      return file_->program;
    }
    expect("(");
    Prog p = stmts();
    expect(")");
    return p;
  }

  Prog proc_ref() {
    const Token& t = peek();
    std::string nm = ident("procedure name");
    if (!file_) error_at(t, "procedure references need a file");
    auto it = file_->procs.find(nm);
    if (it == file_->procs.end()) error_at(t, "unknown procedure " + nm);
    return it->second;
  }

  NamedSpec spec_ref() {
    if (is("{") || is("[")) return spec_body();
    const Token& t = peek();
    std::string nm = ident("specification name");
    if (nm == "main") {
      if (!file_->spec) error_at(t, "no unnamed specification before the proof");
      return *file_->spec;
    }
    auto it = file_->specs.find(nm);
    if (it == file_->specs.end()) error_at(t, "unknown specification " + nm);
    return it->second;
  }

  ProofPtr proof_node(bool root) {
    auto node = std::make_shared<ProofNode>();
    const Token& start = peek();
    node->loc = start.loc;
    std::string rn = hyphen_ident();
    auto rule = rule_from_name(rn);
    if (!rule) error_at(start, "unknown rule " + rn);
    node->rule = *rule;
    while (true) {
      if (accept_word("var")) {
        const Token& t = peek();
        std::string v = ident("variable");
        auto id = st_->find_var(v);
        if (!id) error_at(t, "unknown variable " + v);
        node->variable = *id;
      } else if (accept_word("with")) {
        do {
          const Token& t = peek();
          std::string v = ident("auxiliary variable");
          auto id = st_->find_var(v);
          if (!id) error_at(t, "unknown variable " + v);
          expect(":=");
          node->aux_updates.push_back({*id, expr()});
        } while (accept(","));
      } else if (accept_word("witness")) {
        node->witness = prog_ref();
      } else {
        break;
      }
    }
    expect("{");
    bool have_conclusion = false;
    if (accept_word("sat")) {
      node->conclusion.program = prog_ref();
      NamedSpec s = spec_ref();
      node->conclusion.spec = s.spec;
      node->conclusion.bracket = s.bracket;
      expect(";");
      have_conclusion = true;
    }
    if (!have_conclusion) {
      if (!root) error_at(start, "proof node needs a 'sat' conclusion");
      node->conclusion = file_->specified_program();
    }
    while (!is("}")) node->premises.push_back(proof_node(false));
    next();
    return node;
  }

  // -- programs

  Prog stmts() {
    std::vector<Prog> parts{stmt()};
    while (accept(";")) parts.push_back(stmt());
    return mk_seq_list(parts);
  }

  Prog stmt() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (accept("skip")) return mk_skip(loc);
    if (accept("@")) return proc_ref();
    if (accept("(")) {
      Prog p = stmts();
      expect(")");
      return p;
    }
    if (accept("begin")) {
      expect("loc");
      std::vector<int> decls;
      do {
        const Token& vt = peek();
        std::string v = ident("local variable");
        auto id = st_->find_var(v);
        if (!id) error_at(vt, "unknown variable " + v + " (declare it with var)");
        decls.push_back(*id);
      } while (accept(","));
      expect(";");
      Prog body = stmts();
      expect("end");
      return mk_block(std::move(decls), std::move(body), loc);
    }
    if (accept("if")) {
      ExprPtr b = expr();
      expect("then");
      Prog a = stmts();
      Prog c = accept("else") ? stmts() : mk_skip(loc);
      expect("fi");
      return mk_if(std::move(b), std::move(a), std::move(c), loc);
    }
    if (accept("while")) {
      ExprPtr b = expr();
      expect("do");
      Prog body = stmts();
      expect("od");
      return mk_while(std::move(b), std::move(body), loc);
    }
    if (accept("await")) {
      ExprPtr b = expr();
      expect("do");
      Prog body = stmts();
      expect("od");
      return mk_await(std::move(b), std::move(body), loc);
    }
    if (is("par") || is("{")) {
      accept("par");
      expect("{");
      std::vector<Prog> arms{stmts()};
      while (accept("||")) arms.push_back(stmts());
      expect("}");
      if (arms.size() < 2) error_at(t, "parallel composition needs two arms");
      Prog acc = arms.back();
      for (std::size_t i = arms.size() - 1; i-- > 0;) acc = mk_par(arms[i], acc, loc);
      return acc;
    }
    if (peek().kind == Token::Kind::Ident && is(":=", 1)) {
      std::string v = next().text;
      auto id = st_->find_var(v);
      if (!id) error_at(t, "unknown variable " + v);
      next();
      return mk_assign(*id, expr(), loc);
    }
    error("expected a statement");
  }

  // -- expressions

  ExprPtr typed(ExprPtr e, const Token& at, bool boolean) {
    try {
      Type t = type_of(*st_, e);
      if (boolean && t.kind != Type::Kind::Bool && t.kind != Type::Kind::Unknown)
        error_at(at, "assertion has type " + t.str() + ", expected bool");
    } catch (const InputError& err) {
      if (std::string(err.what()).rfind(name_ + ":", 0) == 0) throw;
      error_at(at, err.what());
    }
    return e;
  }

  ExprPtr formula() {
    const Token& t = peek();
    return typed(expr(), t, true);
  }

  ExprPtr expr() {
    std::vector<ExprPtr> parts{iff()};
    while (is("|") && !is("||")) {
      next();
      parts.push_back(iff());
    }
    return parts.size() == 1 ? parts[0] : mk_compose(std::move(parts));
  }

  ExprPtr iff() {
    ExprPtr e = implies();
    while (accept("<=>")) e = mk(Op::Iff, {e, implies()});
    return e;
  }

  ExprPtr implies() {
    ExprPtr e = disj();
    if (accept("=>")) return mk_implies(e, implies());
    return e;
  }

  ExprPtr disj() {
    std::vector<ExprPtr> parts{conj()};
    while (accept("or")) parts.push_back(conj());
    return parts.size() == 1 ? parts[0] : mk(Op::Or, std::move(parts));
  }

  ExprPtr conj() {
    std::vector<ExprPtr> parts{negation()};
    while (accept("and")) parts.push_back(negation());
    return parts.size() == 1 ? parts[0] : mk(Op::And, std::move(parts));
  }

  ExprPtr negation() {
    if (accept("not")) return mk_not(negation());
    if (is("forall") || is("exists")) return quantifier();
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr l = additive();
    static const std::pair<const char*, Op> ops[] = {{"=", Op::Eq},   {"!=", Op::Ne},       {"<=", Op::Le},
                                                     {">=", Op::Ge},  {"<", Op::Lt},        {">", Op::Gt},
                                                     {"in", Op::In},  {"notin", Op::NotIn}, {"subset", Op::Subset}};
    for (auto [text, op] : ops)
      if (accept(text)) return mk(op, {l, additive()});
    return l;
  }

  ExprPtr additive() {
    ExprPtr e = multiplicative();
    while (true) {
      Op op;
      if (is("+")) op = Op::Add;
      else if (is("-")) op = Op::Sub;
      else if (is("union")) op = Op::Union;
      else if (is("\\")) op = Op::Diff;
      else if (is("++")) op = Op::Concat;
      else return e;
      next();
      e = mk(op, {e, multiplicative()});
    }
  }

  ExprPtr multiplicative() {
    ExprPtr e = unary();
    while (true) {
      Op op;
      if (is("*")) op = Op::Mul;
      else if (is("/")) op = Op::Div;
      else if (is("%")) op = Op::Mod;
      else if (is("inter")) op = Op::Inter;
      else return e;
      next();
      e = mk(op, {e, unary()});
    }
  }

  ExprPtr unary() {
    if (accept("-")) {
      if (peek().kind == Token::Kind::Int) {
        const Token& t = next();
        return postfix(mk_int(-parse_int(t)));
      }
      return mk(Op::Neg, {unary()});
    }
    if (accept("#")) return mk(Op::Card, {unary()});
    return postfix(primary());
  }

  std::int64_t parse_int(const Token& t) {
    try {
      return std::stoll(t.text);
    } catch (const std::exception&) {
      error_at(t, "integer literal out of range");
    }
  }

  ExprPtr postfix(ExprPtr e) {
    while (accept("[")) {
      ExprPtr i = expr();
      expect("]");
      e = mk(Op::Index, {e, i});
    }
    return e;
  }

  std::vector<ExprPtr> list(const char* close) {
    std::vector<ExprPtr> out;
    if (is(close)) return out;
    do out.push_back(expr());
    while (accept(","));
    return out;
  }

  ExprPtr call(const std::string& fn, const Token& t) {
    expect("(");
    auto args = list(")");
    expect(")");
    auto arity = [&](std::size_t n) {
      if (args.size() != n) error_at(t, fn + " takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
    };
    if (fn == "len") {
      arity(1);
      return mk(Op::Len, std::move(args));
    }
    if (fn == "max" || fn == "min") {
      if (args.empty()) error_at(t, fn + " needs an argument");
      return mk(fn == "max" ? Op::Max : Op::Min, std::move(args));
    }
    if (fn == "compose") {
      if (args.size() < 2) error_at(t, "compose takes at least two arguments");
      return mk_compose(std::move(args));
    }
    if (fn == "tc" || fn == "rtc") {
      arity(1);
      return mk_closure(args[0], fn == "rtc");
    }
    if (fn == "pres") {
      arity(2);
      return mk_preserve(args[0], args[1]);
    }
    if (fn == "hook") {
      arity(1);
      return hook_expression(args[0]);
    }
    error_at(t, "unknown function " + fn);
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      next();
      return mk_int(parse_int(t));
    }
    if (accept("(")) {
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    if (accept("[")) {
      auto items = list("]");
      expect("]");
      return mk(Op::SeqLit, std::move(items));
    }
    if (accept("{")) {
      auto items = list("}");
      expect("}");
      return mk(Op::SetLit, std::move(items));
    }
    if (accept("~")) {
      const Token& vt = peek();
      return name_ref(ident("variable after ~"), true, vt);
    }
    if (t.kind != Token::Kind::Ident) error("expected an expression");
    std::string word = next().text;
    if (word == "true") return mk_true();
    if (word == "false") return mk_false();
    if (word == "I") {
      std::vector<int> frame;
      if (is("{") && peek().begin == t.end) {
        next();
        if (!is("}")) {
          do {
            const Token& vt = peek();
            std::string v = ident("variable");
            auto id = st_->find_var(v);
            if (!id) error_at(vt, "unknown variable " + v);
            frame.push_back(*id);
          } while (accept(","));
        }
        expect("}");
      }
      return mk_identity(*st_, std::move(frame));
    }
    if (is("(")) return call(word, t);
    if (reserved(word)) error_at(t, "unexpected '" + word + "'");
    return name_ref(word, false, t);
  }

  ExprPtr name_ref(const std::string& word, bool hooked, const Token& t) {
    int sym = intern(word);
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (it->first == sym && it->second == hooked) return mk_bound(sym, hooked);
    if (file_) {
      auto l = file_->lets.find(word);
      if (l != file_->lets.end()) return hooked ? hook_expression(l->second) : l->second;
    }
    if (!hooked && st_->enum_sort_of(sym)) return mk_lit(Value::enumeration(sym));
    auto id = st_->find_var(word);
    if (!id) {
      for (const auto& b : bound_)
        if (b.first == sym) error_at(t, "bound variable " + word + " used with the wrong hook");
      error_at(t, "unknown name " + word);
    }
    return mk_var(*st_, *id, hooked);
  }

  ExprPtr quantifier() {
    Op op = next().text == "forall" ? Op::Forall : Op::Exists;
    std::vector<Binder> binders;
    do {
      Binder b;
      b.hooked = accept("~");
      const Token& vt = peek();
      std::string nm = ident("bound variable");
      if (reserved(nm)) error_at(vt, nm + " is a reserved word");
      b.sym = intern(nm);
      if (accept(":")) {
        b.sort = sort_expr();
      } else {
        auto id = st_->find_var(nm);
        if (!id) error_at(vt, "bound variable " + nm + " needs a sort");
        b.sort = st_->var(*id).sort;
      }
      binders.push_back(b);
    } while (accept(","));
    expect(".");
    std::size_t mark = bound_.size();
    for (const auto& b : binders) bound_.push_back({b.sym, b.hooked});
    ExprPtr body = expr();
    bound_.resize(mark);
    return mk_quant(op, std::move(binders), std::move(body));
  }
};

}  // namespace

SourceFile parse_source(const std::string& text, const std::string& name) {
  Parser p(text, name, std::make_shared<Structure>());
  return p.file();
}

SourceFile parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_source(buf.str(), path);
}

Prog parse_program(const std::string& text, Structure& st) {
  Parser p(text, "<program>", std::shared_ptr<Structure>(&st, [](Structure*) {}));
  return p.program_only();
}

ExprPtr parse_expression(const std::string& text, Structure& st) {
  Parser p(text, "<expression>", std::shared_ptr<Structure>(&st, [](Structure*) {}));
  return p.expression_only();
}

}  // namespace lsp
