#include "lsp/value.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace lsp {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_map<std::string, int> ids;
  std::vector<std::unique_ptr<std::string>> names;
};

SymbolTable& symbols() {
  static SymbolTable t;
  return t;
}

}  // namespace

int intern(const std::string& name) {
  auto& t = symbols();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  int id = static_cast<int>(t.names.size());
  t.names.push_back(std::make_unique<std::string>(name));
  t.ids.emplace(name, id);
  return id;
}

const std::string& symbol_name(int sym) {
  auto& t = symbols();
  std::lock_guard<std::mutex> lock(t.mu);
  return *t.names.at(static_cast<std::size_t>(sym));
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.num_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t n) {
  Value v;
  v.kind_ = Kind::Int;
  v.num_ = n;
  return v;
}

Value Value::enumeration(int symbol) {
  Value v;
  v.kind_ = Kind::Enum;
  v.num_ = symbol;
  return v;
}

Value Value::sequence(std::vector<Value> elems) {
  Value v;
  v.kind_ = Kind::Seq;
  v.elems_ = std::move(elems);
  return v;
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Value v;
  v.kind_ = Kind::Set;
  v.elems_ = std::move(elems);
  return v;
}

std::string kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Int: return "int";
    case Value::Kind::Enum: return "enum";
    case Value::Kind::Seq: return "sequence";
    case Value::Kind::Set: return "set";
  }
  return "?";
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw EvalError("expected bool, got " + kind_name(kind_) + " " + str());
  return num_ != 0;
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw EvalError("expected int, got " + kind_name(kind_) + " " + str());
  return num_;
}

int Value::as_enum() const {
  if (kind_ != Kind::Enum) throw EvalError("expected enum, got " + kind_name(kind_));
  return static_cast<int>(num_);
}

const std::vector<Value>& Value::elems() const {
  if (kind_ != Kind::Seq && kind_ != Kind::Set)
    throw EvalError("expected sequence or set, got " + kind_name(kind_) + " " + str());
  return elems_;
}

std::size_t Value::hash() const {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x100000001b3ULL;
  hash_combine(h, std::hash<std::int64_t>{}(num_));
  for (const auto& e : elems_) hash_combine(h, e.hash());
  return h;
}

std::string Value::str() const {
  switch (kind_) {
    case Kind::Bool: return num_ ? "true" : "false";
    case Kind::Int: return std::to_string(num_);
    case Kind::Enum: return symbol_name(static_cast<int>(num_));
    case Kind::Seq:
    case Kind::Set: {
      std::string out = kind_ == Kind::Seq ? "[" : "{";
      for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) out += ", ";
        out += elems_[i].str();
      }
      out += kind_ == Kind::Seq ? "]" : "}";
      return out;
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  return a.kind_ == b.kind_ && a.num_ == b.num_ && a.elems_ == b.elems_;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  if (a.kind_ == Value::Kind::Seq || a.kind_ == Value::Kind::Set) {
    std::size_t n = std::min(a.elems_.size(), b.elems_.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto c = a.elems_[i] <=> b.elems_[i];
      if (c != 0) return c;
    }
    return a.elems_.size() <=> b.elems_.size();
  }
  return a.num_ <=> b.num_;
}

std::size_t hash_state(const State& s) {
  std::size_t h = s.size();
  for (const auto& v : s) hash_combine(h, v.hash());
  return h;
}

}  // namespace lsp
