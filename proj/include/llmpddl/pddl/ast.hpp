#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "llmpddl/pddl/types.hpp"

namespace llmpddl::pddl {

// `name` carries the leading '?' for variables.
struct TypedName {
  std::string name;
  std::string type;

  friend auto operator<=>(const TypedName&, const TypedName&) = default;
};

struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Literal {
  bool positive = true;
  Atom atom;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// (= a b) or (not (= a b)) between parameters.
struct Equality {
  std::string lhs;
  std::string rhs;
  bool negated = true;

  friend auto operator<=>(const Equality&, const Equality&) = default;
};

struct PredicateDef {
  std::string name;
  std::vector<TypedName> params;
  std::string description;

  friend bool operator==(const PredicateDef&, const PredicateDef&) = default;
};

struct ActionModel {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> precondition;
  std::vector<Equality> constraints;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;
  // Conversation/message that produced the model; empty for handwritten ones.
  std::string provenance;

  const TypedName* find_param(std::string_view variable) const;

  friend bool operator==(const ActionModel&, const ActionModel&) = default;
};

struct DomainModel {
  std::string name;
  TypeHierarchy types;
  std::vector<PredicateDef> predicates;
  std::vector<ActionModel> actions;

  const PredicateDef* find_predicate(std::string_view name) const;
  const ActionModel* find_action(std::string_view name) const;
  ActionModel* find_action(std::string_view name);

  friend bool operator==(const DomainModel&, const DomainModel&) = default;
};

struct ProblemSpec {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<Literal> goal;

  const TypedName* find_object(std::string_view name) const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct PlanStep {
  std::string action;
  std::vector<std::string> args;

  friend auto operator<=>(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;

  friend bool operator==(const Plan&, const Plan&) = default;
};

// "(pred a b)" / "(not (pred a b))" / "(action a b)".
std::string to_string(const Atom& atom);
std::string to_string(const Literal& literal);
std::string to_string(const Equality& eq);
std::string to_string(const PlanStep& step);
std::string signature(const PredicateDef& pred);  // "(name ?x - t ...)"

// Lowercase, `_` replaced by `-`. Applied to predicate and action names.
std::string normalize_symbol(std::string_view s);

}  // namespace llmpddl::pddl
