#include "llmpddl/pddl/ast.hpp"

#include <algorithm>

namespace llmpddl::pddl {

namespace {

template <typename Range>
auto find_named(Range& range, std::string_view name) -> decltype(&*range.begin()) {
  auto it = std::find_if(range.begin(), range.end(), [&](const auto& x) { return x.name == name; });
  return it == range.end() ? nullptr : &*it;
}

}  // namespace

const TypedName* ActionModel::find_param(std::string_view variable) const {
  return find_named(params, variable);
}

const PredicateDef* DomainModel::find_predicate(std::string_view name) const {
  return find_named(predicates, name);
}

const ActionModel* DomainModel::find_action(std::string_view name) const {
  return find_named(actions, name);
}

ActionModel* DomainModel::find_action(std::string_view name) { return find_named(actions, name); }

const TypedName* ProblemSpec::find_object(std::string_view name) const {
  return find_named(objects, name);
}

std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& arg : atom.args) out += " " + arg;
  return out + ")";
}

std::string to_string(const Literal& literal) {
  return literal.positive ? to_string(literal.atom) : "(not " + to_string(literal.atom) + ")";
}

std::string to_string(const Equality& eq) {
  std::string inner = "(= " + eq.lhs + " " + eq.rhs + ")";
  return eq.negated ? "(not " + inner + ")" : inner;
}

std::string to_string(const PlanStep& step) { return to_string(Atom{step.action, step.args}); }

std::string signature(const PredicateDef& pred) {
  std::string out = "(" + pred.name;
  for (const auto& p : pred.params) out += " " + p.name + " - " + p.type;
  return out + ")";
}

std::string normalize_symbol(std::string_view s) {
  std::string out = to_lower(s);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

}  // namespace llmpddl::pddl
