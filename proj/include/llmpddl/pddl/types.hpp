#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llmpddl::pddl {

inline constexpr std::string_view kRootType = "object";

// Single-inheritance type forest rooted at the implicit `object` type.
//
// Type names keep the spelling they were declared with; every lookup is
// case-insensitive, so `smallreceptacle` resolves to `smallReceptacle`.
// Declaration order is preserved and drives printing.
class TypeHierarchy {
 public:
  TypeHierarchy() = default;

  // Builds a hierarchy from (type, parent) pairs in declaration order.
  // Parents that are never declared themselves are appended with parent
  // `object`. Throws ModelError on cycles or conflicting redeclarations.
  static TypeHierarchy from_declarations(
      const std::vector<std::pair<std::string, std::string>>& declarations);

  // Adds a new type under an existing parent. Redeclaring a type with the
  // same parent is a no-op; with a different parent it throws ModelError.
  void add(const std::string& name, std::string_view parent = kRootType);

  bool contains(std::string_view name) const;
  // Declared spelling of `name`, if declared (the root included).
  std::optional<std::string> canonical(std::string_view name) const;
  // Parent of a declared type; the root has none.
  std::optional<std::string> parent(std::string_view name) const;

  // Reflexive-transitive ancestry. Throws UnknownType.
  bool is_subtype(std::string_view sub, std::string_view super) const;

  // Declared types, excluding the root, in declaration order.
  const std::vector<std::string>& types() const { return order_; }
  bool empty() const { return order_.empty(); }

  friend bool operator==(const TypeHierarchy&, const TypeHierarchy&) = default;

 private:
  std::optional<std::size_t> index_of(std::string_view name) const;

  std::vector<std::string> order_;
  std::vector<std::string> parents_;
};

bool is_subtype(std::string_view sub, std::string_view super, const TypeHierarchy& h);

// Case-insensitive identifier comparison.
bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);

}  // namespace llmpddl::pddl
