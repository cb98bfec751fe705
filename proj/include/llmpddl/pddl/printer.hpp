#pragma once

#include <string>

#include "llmpddl/pddl/ast.hpp"

namespace llmpddl::pddl {

// Canonical text: lowercase symbols, two-space indentation, declaration
// order. parse_domain(print_domain(d)) == d.
std::string print_domain(const DomainModel& domain);
std::string print_problem(const ProblemSpec& problem);
std::string print_plan(const Plan& plan);

// A single action block as it appears inside a domain, indented by two.
std::string print_action(const ActionModel& action);

}  // namespace llmpddl::pddl
