#pragma once

// Seeded-error corpus for the auditor: each instance injects one error of a
// known category into a clean fixture action, and keeps the unmutated
// original as its fix.

#include <optional>
#include <string>
#include <vector>

#include "llmpddl/audit/auditor.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "support.hpp"

namespace testsupport {

struct SeededError {
  std::string domain;
  std::string action;
  llmpddl::audit::Category category;
  std::string note;
  // Either a whole domain source or a single-action proposal.
  std::optional<std::string> source;
  std::optional<std::string> fixed_source;
  llmpddl::audit::ActionProposal proposal;
  llmpddl::audit::ActionProposal fixed_proposal;
  llmpddl::builder::PredicateRegistry registry;
  llmpddl::pddl::TypeHierarchy types;

  llmpddl::audit::AuditReport audit(const llmpddl::audit::Auditor& a, bool fixed) const {
    if (source) return a.audit_source(fixed ? *fixed_source : *source);
    return a.audit_action(fixed ? fixed_proposal : proposal, registry, types);
  }
};

namespace detail {

inline SeededError base(const std::string& dname, const llmpddl::pddl::DomainModel& d,
                        const llmpddl::pddl::ActionModel& a, llmpddl::audit::Category c) {
  SeededError s;
  s.domain = dname;
  s.action = a.name;
  s.category = c;
  s.proposal.model = a;
  s.fixed_proposal.model = a;
  s.registry = llmpddl::builder::PredicateRegistry::from_domain(d);
  s.types = d.types;
  return s;
}

inline std::string insert_into_precondition(const std::string& text, const std::string& action,
                                            const std::string& formula) {
  std::size_t at = text.find("(:action " + action + "\n");
  if (at == std::string::npos) at = text.find("(:action " + action + " ");
  const std::string key = ":precondition (and";
  at = text.find(key, at) + key.size();
  return text.substr(0, at) + " " + formula + text.substr(at);
}

// The literal to mutate: first precondition literal, else first add effect.
inline llmpddl::pddl::Atom* target_atom(llmpddl::pddl::ActionModel& m) {
  if (!m.precondition.empty()) return &m.precondition.front().atom;
  if (!m.add_effects.empty()) return &m.add_effects.front();
  return nullptr;
}

inline bool seed_type_mismatch(llmpddl::pddl::ActionModel& m, const llmpddl::pddl::DomainModel& d) {
  auto try_atom = [&](llmpddl::pddl::Atom& atom) {
    const auto* def = d.find_predicate(atom.predicate);
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      for (const auto& p : m.params) {
        if (!d.types.is_subtype(p.type, def->params[i].type)) {
          atom.args[i] = p.name;
          return true;
        }
      }
    }
    return false;
  };
  for (auto& l : m.precondition) {
    if (try_atom(l.atom)) return true;
  }
  for (auto& a : m.add_effects) {
    if (try_atom(a)) return true;
  }
  return false;
}

}  // namespace detail

// At least 12 instances per category over logistics, tyreworld and household.
inline std::vector<SeededError> seeded_corpus() {
  using llmpddl::audit::Category;
  static const std::vector<std::string> keywords = {"forall", "exists", "when", "imply", "oneof"};
  static const std::vector<std::string> bad_types = {"pump", "gizmo", "vehicle", "place"};
  std::vector<SeededError> out;
  for (const std::string dname : {"logistics", "tyreworld", "household"}) {
    const std::string text = fixture(dname + "/domain.pddl");
    const auto d = domain(dname);
    const auto& actions = d.actions;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& a = actions[(k * 5 + 1) % actions.size()];

      {
        auto s = detail::base(dname, d, a, Category::UnsupportedKeyword);
        const std::string& kw = keywords[(k + out.size()) % keywords.size()];
        const auto& p = a.params.front();
        std::string formula = "(" + kw + " (?q - " + p.type + ") (= ?q " + p.name + "))";
        if (kw == "when" || kw == "imply" || kw == "oneof") formula = "(" + kw + " (= " + p.name + " " + p.name + "))";
        s.source = detail::insert_into_precondition(text, a.name, formula);
        s.fixed_source = text;
        s.note = formula;
        out.push_back(std::move(s));
      }
      {
        auto s = detail::base(dname, d, a, Category::TypeNameClash);
        const std::string& type = d.types.types()[k % d.types.types().size()];
        s.proposal.new_predicates.push_back(
            {llmpddl::pddl::normalize_symbol(type), {{"?x", type}}, "true if ?x is a " + type});
        s.note = type;
        out.push_back(std::move(s));
      }
      {
        auto s = detail::base(dname, d, a, Category::PredicateNameClash);
        auto copy = *d.find_predicate(detail::target_atom(s.proposal.model)->predicate);
        copy.description += " (redefined)";
        s.proposal.new_predicates.push_back(copy);
        s.note = copy.name;
        out.push_back(std::move(s));
      }
      {
        auto s = detail::base(dname, d, a, Category::InvalidObjectType);
        auto& p = s.proposal.model.params[k % a.params.size()];
        p.type = bad_types[k];
        s.note = p.name + " - " + p.type;
        out.push_back(std::move(s));
      }
      {
        auto s = detail::base(dname, d, a, Category::PredicateUsageMismatch);
        auto& m = s.proposal.model;
        std::size_t kind = k % 3;
        if (kind == 0 && !detail::seed_type_mismatch(m, d)) kind = 1;
        auto* atom = detail::target_atom(m);
        if (kind == 1) {
          if (atom->args.empty()) {
            atom->args.push_back(m.params.front().name);
          } else {
            atom->args.pop_back();
          }
        } else if (kind == 2) {
          atom->predicate += "-undefined";
        }
        s.note = "kind " + std::to_string(kind);
        out.push_back(std::move(s));
      }
      {
        auto s = detail::base(dname, d, a, Category::ContradictoryEffects);
        auto& m = s.proposal.model;
        if (!m.add_effects.empty() && (k % 2 == 0 || m.del_effects.empty())) {
          auto atom = m.add_effects.front();
          m.del_effects.push_back(atom);
        } else {
          auto atom = m.del_effects.front();
          m.add_effects.push_back(atom);
        }
        s.note = "k " + std::to_string(k);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace testsupport
