#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/pddl/errors.hpp"

namespace llmpddl::builder {

class CorruptRegistry : public pddl::PddlError {
 public:
  using PddlError::PddlError;
};

// The running list of predicates with their descriptions, shared by every
// action constructed in a project.
class PredicateRegistry {
 public:
  PredicateRegistry() = default;
  static PredicateRegistry from_domain(const pddl::DomainModel& domain);

  const std::vector<pddl::PredicateDef>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const pddl::PredicateDef* find(std::string_view name) const;

  // Appends without any collision check; see merge_predicates.
  void append(pddl::PredicateDef def, const std::string& origin_action);
  // Replaces the entry of the same name. Only used by feedback revisions.
  void replace(const pddl::PredicateDef& def);
  // Records that `action` uses `predicate`.
  void note_use(const std::string& predicate, const std::string& action);
  // Actions that introduced or used a predicate, first one first.
  std::vector<std::string> origins(std::string_view predicate) const;

  // Numbered "(name ?x - t): description" lines, as in the prompt examples. Empty
  // registries render as a sentence so the prompt never has a bare header.
  std::string render_for_prompt() const;

  // predicates.txt: one "(name ?x - t) ; description" line per entry.
  std::string to_text() const;
  static PredicateRegistry from_text(std::string_view text);

  // Origins are bookkeeping and not persisted; equality ignores them.
  friend bool operator==(const PredicateRegistry& a, const PredicateRegistry& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<pddl::PredicateDef> entries_;
  std::map<std::string, std::vector<std::string>> origins_;
};

}  // namespace llmpddl::builder
