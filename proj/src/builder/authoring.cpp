#include "llmpddl/builder/authoring.hpp"

#include "llmpddl/pddl/action_block.hpp"

namespace llmpddl::builder {

std::vector<pddl::PredicateDef> introduced_predicates(const pddl::ActionModel& model, const pddl::DomainModel& domain,
                                                      std::set<std::string>& known) {
  std::vector<pddl::PredicateDef> out;
  auto visit = [&](const pddl::Atom& a) {
    if (!known.insert(a.predicate).second) return;
    if (const auto* def = domain.find_predicate(a.predicate)) out.push_back(*def);
  };
  for (const auto& l : model.precondition) visit(l.atom);
  for (const auto& a : model.add_effects) visit(a);
  for (const auto& a : model.del_effects) visit(a);
  return out;
}

std::string author_reply(const pddl::ActionModel& model, const pddl::DomainModel& domain,
                         std::set<std::string>& known) {
  return pddl::print_action_block(model, introduced_predicates(model, domain, known));
}

}  // namespace llmpddl::builder
