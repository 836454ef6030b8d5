#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsp {

// Raised when an expression cannot be evaluated (type clash, index out of
// range, min/max of an empty set, store outside a strict carrier).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: parse errors, ill-formed specifications, schema errors.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The configuration budget was exhausted.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Interned names. Thread-safe, process wide.
int intern(const std::string& name);
const std::string& symbol_name(int sym);

class Value {
 public:
  enum class Kind : std::uint8_t { Bool, Int, Enum, Seq, Set };

  Value() = default;

  static Value boolean(bool b);
  static Value integer(std::int64_t n);
  static Value enumeration(int symbol);
  static Value sequence(std::vector<Value> elems);
  // Sorts and removes duplicates.
  static Value set(std::vector<Value> elems);

  Kind kind() const { return kind_; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_enum() const { return kind_ == Kind::Enum; }
  bool is_seq() const { return kind_ == Kind::Seq; }
  bool is_set() const { return kind_ == Kind::Set; }

  bool as_bool() const;
  std::int64_t as_int() const;
  int as_enum() const;
  const std::vector<Value>& elems() const;

  std::size_t hash() const;
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  Kind kind_ = Kind::Bool;
  std::int64_t num_ = 0;
  std::vector<Value> elems_;
};

using State = std::vector<Value>;

std::size_t hash_state(const State& s);
std::string kind_name(Value::Kind k);

struct StateHash {
  std::size_t operator()(const State& s) const { return hash_state(s); }
};

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace lsp
