#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/pddl/sexpr.hpp"

namespace llmpddl::pddl {

struct ParseOptions {
  // Check predicate usage against declarations: arity, argument types and
  // unknown predicates/types. Auditing pipelines switch this off so the
  // auditor can report the problems as findings instead.
  bool check_types = true;
};

// A use of an unsupported connective, collected instead of thrown when a
// sink is passed to the formula readers.
struct UnsupportedUse {
  std::string keyword;
  std::string section;
  std::string snippet;
  std::string action;  // set when read from a whole domain
};

DomainModel parse_domain(std::string_view text, const ParseOptions& options = {});
DomainModel parse_domain(const SExpr& root, const ParseOptions& options = {},
                         std::vector<UnsupportedUse>* unsupported = nullptr);

ProblemSpec parse_problem(std::string_view text, const DomainModel& domain);

// Plan files: one `(action obj ...)` per line, `;` comments ignored.
Plan parse_plan(std::string_view text);

// Conjunction of literals: `(and l...)`, a single literal, `()` or `(and)`.
struct Conjunction {
  std::vector<Literal> literals;
  std::vector<Equality> equalities;
};
Conjunction parse_conjunction(const SExpr& expr, std::string_view section,
                              std::vector<UnsupportedUse>* unsupported = nullptr);

// Effects: positive atoms are adds, negated atoms deletes.
struct EffectLists {
  std::vector<Atom> add;
  std::vector<Atom> del;
};
EffectLists parse_effects(const SExpr& expr, std::vector<UnsupportedUse>* unsupported = nullptr);

// `?x ?y - t ?z - u` (untyped names get `object`).
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t first,
                                        bool variables);

// Parses and checks a ground goal conjunction against domain and objects.
std::vector<Literal> parse_goal(const SExpr& expr, const DomainModel& domain,
                                const std::vector<TypedName>& objects);

// Checks predicate usage and typing of every action; throws the first
// violation (UnknownPredicate, UnknownType, ArityMismatch, TypeMismatch).
void check_domain(const DomainModel& domain);

// Keywords rejected as outside the STRIPS subset.
bool is_unsupported_keyword(std::string_view word);

}  // namespace llmpddl::pddl
