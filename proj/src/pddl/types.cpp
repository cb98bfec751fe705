#include "llmpddl/pddl/types.hpp"

#include <algorithm>
#include <cctype>

#include "llmpddl/pddl/errors.hpp"

namespace llmpddl::pddl {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

TypeHierarchy TypeHierarchy::from_declarations(
    const std::vector<std::pair<std::string, std::string>>& declarations) {
  TypeHierarchy h;
  auto declare = [&h](const std::string& name, const std::string& parent) {
    if (iequals(name, kRootType)) {
      if (!iequals(parent, kRootType)) throw ModelError("type 'object' cannot have a parent");
      return;
    }
    if (auto i = h.index_of(name)) {
      if (!h.parents_[*i].empty() && !iequals(h.parents_[*i], parent) && !parent.empty()) {
        throw ModelError("type '" + name + "' declared with parents '" + h.parents_[*i] +
                         "' and '" + parent + "'");
      }
      if (h.parents_[*i].empty()) h.parents_[*i] = parent;
      return;
    }
    h.order_.push_back(name);
    h.parents_.push_back(parent);
  };
  for (const auto& [name, parent] : declarations) declare(name, parent);
  // Parents never declared on their own hang below the root.
  for (std::size_t i = 0; i < h.order_.size(); ++i) {
    const std::string parent = h.parents_[i];
    if (!iequals(parent, kRootType) && !h.index_of(parent)) {
      h.order_.push_back(parent);
      h.parents_.push_back(std::string(kRootType));
    }
  }
  // Canonicalize parent spellings and reject cycles.
  for (std::size_t i = 0; i < h.order_.size(); ++i) {
    h.parents_[i] = *h.canonical(h.parents_[i]);
  }
  for (std::size_t i = 0; i < h.order_.size(); ++i) {
    std::string current = h.order_[i];
    for (std::size_t steps = 0; !iequals(current, kRootType); ++steps) {
      if (steps > h.order_.size()) throw ModelError("cyclic type hierarchy at '" + h.order_[i] + "'");
      current = h.parents_[*h.index_of(current)];
    }
  }
  return h;
}

void TypeHierarchy::add(const std::string& name, std::string_view parent) {
  auto canonical_parent = canonical(parent);
  if (!canonical_parent) throw UnknownType(std::string(parent));
  if (iequals(name, kRootType)) throw ModelError("type 'object' is implicit");
  if (auto i = index_of(name)) {
    if (!iequals(parents_[*i], *canonical_parent)) {
      throw ModelError("type '" + name + "' already declared with parent '" + parents_[*i] + "'");
    }
    return;
  }
  order_.push_back(name);
  parents_.push_back(*canonical_parent);
}

std::optional<std::size_t> TypeHierarchy::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (iequals(order_[i], name)) return i;
  }
  return std::nullopt;
}

bool TypeHierarchy::contains(std::string_view name) const {
  return iequals(name, kRootType) || index_of(name).has_value();
}

std::optional<std::string> TypeHierarchy::canonical(std::string_view name) const {
  if (iequals(name, kRootType)) return std::string(kRootType);
  if (auto i = index_of(name)) return order_[*i];
  return std::nullopt;
}

std::optional<std::string> TypeHierarchy::parent(std::string_view name) const {
  if (auto i = index_of(name)) return parents_[*i];
  return std::nullopt;
}

bool TypeHierarchy::is_subtype(std::string_view sub, std::string_view super) const {
  if (!contains(sub)) throw UnknownType(std::string(sub));
  if (!contains(super)) throw UnknownType(std::string(super));
  std::string current = *canonical(sub);
  while (true) {
    if (iequals(current, super)) return true;
    if (iequals(current, kRootType)) return false;
    current = parents_[*index_of(current)];
  }
}

bool is_subtype(std::string_view sub, std::string_view super, const TypeHierarchy& h) {
  return h.is_subtype(sub, super);
}

}  // namespace llmpddl::pddl
