#include "lsp/structure.hpp"

#include <algorithm>

namespace lsp {

namespace {

constexpr std::size_t kMaxCarrier = 1u << 16;

void seqs_of_len(const std::vector<Value>& elems, std::size_t len, std::vector<Value>& prefix,
                 std::vector<Value>& out) {
  if (prefix.size() == len) {
    out.push_back(Value::sequence(prefix));
    return;
  }
  for (const auto& e : elems) {
    prefix.push_back(e);
    seqs_of_len(elems, len, prefix, out);
    prefix.pop_back();
    if (out.size() > kMaxCarrier) throw InputError("sequence carrier too large");
  }
}

}  // namespace

bool Sort::in_carrier(const Value& v) const {
  return std::binary_search(carrier.begin(), carrier.end(), v);
}

SortPtr make_bool_sort() {
  auto s = std::make_shared<Sort>();
  s->name = "bool";
  s->kind = Sort::Kind::Bool;
  s->carrier = {Value::boolean(false), Value::boolean(true)};
  return s;
}

SortPtr make_range_sort(const std::string& name, std::int64_t lo, std::int64_t hi, bool strict) {
  if (hi < lo) throw InputError("empty range sort " + name);
  if (hi - lo >= static_cast<std::int64_t>(kMaxCarrier)) throw InputError("range sort too large: " + name);
  auto s = std::make_shared<Sort>();
  s->name = name;
  s->kind = Sort::Kind::Range;
  s->lo = lo;
  s->hi = hi;
  s->strict = strict;
  for (auto i = lo; i <= hi; ++i) s->carrier.push_back(Value::integer(i));
  return s;
}

SortPtr make_enum_sort(const std::string& name, const std::vector<std::string>& literals, bool strict) {
  if (literals.empty()) throw InputError("empty enum sort " + name);
  auto s = std::make_shared<Sort>();
  s->name = name;
  s->kind = Sort::Kind::Enum;
  s->strict = strict;
  for (const auto& l : literals) {
    s->literals.push_back(intern(l));
    s->carrier.push_back(Value::enumeration(s->literals.back()));
  }
  std::sort(s->carrier.begin(), s->carrier.end());
  return s;
}

SortPtr make_seq_sort(const std::string& name, SortPtr element, std::size_t max_len, bool strict) {
  auto s = std::make_shared<Sort>();
  s->name = name;
  s->kind = Sort::Kind::Seq;
  s->element = element;
  s->max_len = max_len;
  s->strict = strict;
  std::vector<Value> prefix;
  for (std::size_t len = 0; len <= max_len; ++len) seqs_of_len(element->carrier, len, prefix, s->carrier);
  std::sort(s->carrier.begin(), s->carrier.end());
  return s;
}

SortPtr make_set_sort(const std::string& name, SortPtr element, bool strict) {
  const auto& elems = element->carrier;
  if (elems.size() > 16) throw InputError("set sort element carrier too large: " + name);
  auto s = std::make_shared<Sort>();
  s->name = name;
  s->kind = Sort::Kind::Set;
  s->element = element;
  s->strict = strict;
  for (std::size_t mask = 0; mask < (std::size_t{1} << elems.size()); ++mask) {
    std::vector<Value> sub;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (mask & (std::size_t{1} << i)) sub.push_back(elems[i]);
    s->carrier.push_back(Value::set(std::move(sub)));
  }
  std::sort(s->carrier.begin(), s->carrier.end());
  return s;
}

Type Type::of(const Sort& s) {
  Type t;
  switch (s.kind) {
    case Sort::Kind::Bool: t.kind = Kind::Bool; break;
    case Sort::Kind::Range: t.kind = Kind::Int; break;
    case Sort::Kind::Enum:
      t.kind = Kind::Enum;
      t.enum_name = s.name;
      break;
    case Sort::Kind::Seq:
      t.kind = Kind::Seq;
      t.elem = std::make_shared<Type>(of(*s.element));
      break;
    case Sort::Kind::Set:
      t.kind = Kind::Set;
      t.elem = std::make_shared<Type>(of(*s.element));
      break;
  }
  return t;
}

std::string Type::str() const {
  switch (kind) {
    case Kind::Unknown: return "?";
    case Kind::Bool: return "bool";
    case Kind::Int: return "int";
    case Kind::Enum: return enum_name;
    case Kind::Seq: return "seq " + (elem ? elem->str() : "?");
    case Kind::Set: return "set " + (elem ? elem->str() : "?");
  }
  return "?";
}

bool compatible(const Type& a, const Type& b) {
  if (a.kind == Type::Kind::Unknown || b.kind == Type::Kind::Unknown) return true;
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::Enum) return a.enum_name == b.enum_name;
  if (a.kind == Type::Kind::Seq || a.kind == Type::Kind::Set) {
    if (!a.elem || !b.elem) return true;
    return compatible(*a.elem, *b.elem);
  }
  return true;
}

Structure::Structure() { sorts_["bool"] = make_bool_sort(); }

void Structure::add_sort(SortPtr sort) {
  if (sorts_.count(sort->name)) throw InputError("sort declared twice: " + sort->name);
  if (sort->kind == Sort::Kind::Enum)
    for (int l : sort->literals) {
      if (enum_owner_.count(l)) throw InputError("enum literal declared twice: " + symbol_name(l));
      enum_owner_[l] = sort;
    }
  sorts_[sort->name] = std::move(sort);
}

SortPtr Structure::find_sort(const std::string& name) const {
  auto it = sorts_.find(name);
  return it == sorts_.end() ? nullptr : it->second;
}

int Structure::declare_var(const std::string& name, SortPtr sort) {
  if (var_ids_.count(name)) throw InputError("variable declared twice: " + name);
  int id = static_cast<int>(vars_.size());
  vars_.push_back(VarDecl{name, intern(name), std::move(sort)});
  var_ids_[name] = id;
  return id;
}

std::optional<int> Structure::find_var(const std::string& name) const {
  auto it = var_ids_.find(name);
  if (it == var_ids_.end()) return std::nullopt;
  return it->second;
}

SortPtr Structure::enum_sort_of(int symbol) const {
  auto it = enum_owner_.find(symbol);
  return it == enum_owner_.end() ? nullptr : it->second;
}

State Structure::default_state() const {
  State s;
  s.reserve(vars_.size());
  for (const auto& v : vars_) s.push_back(v.sort->carrier.front());
  return s;
}

std::string Structure::show_state(const State& s, const std::vector<int>& vars) const {
  std::string out = "{";
  bool first = true;
  for (int v : vars) {
    if (!first) out += ", ";
    first = false;
    out += var_name(v) + "=" + s.at(static_cast<std::size_t>(v)).str();
  }
  return out + "}";
}

}  // namespace lsp
