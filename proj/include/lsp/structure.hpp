#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lsp/value.hpp"

namespace lsp {

struct Sort;
using SortPtr = std::shared_ptr<const Sort>;

// A finite carrier. Range sorts share the integer kind so that arithmetic
// and comparison between different ranges type-check.
struct Sort {
  enum class Kind { Bool, Range, Enum, Seq, Set };

  std::string name;
  Kind kind = Kind::Bool;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<int> literals;
  SortPtr element;
  std::size_t max_len = 0;
  // A strict sort rejects stores of values outside its carrier.
  bool strict = false;
  std::vector<Value> carrier;  // sorted

  bool in_carrier(const Value& v) const;
};

SortPtr make_bool_sort();
SortPtr make_range_sort(const std::string& name, std::int64_t lo, std::int64_t hi, bool strict = false);
SortPtr make_enum_sort(const std::string& name, const std::vector<std::string>& literals, bool strict = false);
SortPtr make_seq_sort(const std::string& name, SortPtr element, std::size_t max_len, bool strict = false);
SortPtr make_set_sort(const std::string& name, SortPtr element, bool strict = false);

// Static type used by the well-formedness checks.
struct Type {
  enum class Kind { Unknown, Bool, Int, Enum, Seq, Set };
  Kind kind = Kind::Unknown;
  std::string enum_name;
  std::shared_ptr<const Type> elem;

  static Type of(const Sort& s);
  std::string str() const;
};

// Loose equality: Unknown matches anything.
bool compatible(const Type& a, const Type& b);

struct VarDecl {
  std::string name;
  int symbol = -1;
  SortPtr sort;
};

// Sorts and variable declarations shared by every expression, program and
// state built from one input.
class Structure {
 public:
  Structure();

  void add_sort(SortPtr sort);
  SortPtr find_sort(const std::string& name) const;

  int declare_var(const std::string& name, SortPtr sort);
  std::optional<int> find_var(const std::string& name) const;
  const VarDecl& var(int id) const { return vars_.at(static_cast<std::size_t>(id)); }
  std::size_t var_count() const { return vars_.size(); }
  const std::string& var_name(int id) const { return var(id).name; }

  // Enum literal symbol to the sort declaring it.
  SortPtr enum_sort_of(int symbol) const;

  // Every variable at the first carrier value.
  State default_state() const;

  std::string show_state(const State& s, const std::vector<int>& vars) const;

 private:
  std::unordered_map<std::string, SortPtr> sorts_;
  std::vector<VarDecl> vars_;
  std::unordered_map<std::string, int> var_ids_;
  std::unordered_map<int, SortPtr> enum_owner_;
};

using StructurePtr = std::shared_ptr<const Structure>;

}  // namespace lsp
