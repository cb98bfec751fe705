#pragma once

#include <set>
#include <string>
#include <vector>

#include "llmpddl/pddl/ast.hpp"

namespace llmpddl::builder {

// Predicates `model` uses that are not in `known`, in order of first use,
// with their declarations from `domain`. Adds them to `known`.
std::vector<pddl::PredicateDef> introduced_predicates(const pddl::ActionModel& model, const pddl::DomainModel& domain,
                                                      std::set<std::string>& known);

// The reply a well-behaved model would give for `model` when the predicates
// in `known` were already offered. Used to author scripted dialogues.
std::string author_reply(const pddl::ActionModel& model, const pddl::DomainModel& domain,
                         std::set<std::string>& known);

}  // namespace llmpddl::builder
