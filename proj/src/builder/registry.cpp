#include "llmpddl/builder/registry.hpp"

#include <algorithm>
#include <sstream>

#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/sexpr.hpp"

namespace llmpddl::builder {

PredicateRegistry PredicateRegistry::from_domain(const pddl::DomainModel& domain) {
  PredicateRegistry reg;
  reg.entries_ = domain.predicates;
  for (const auto& action : domain.actions) {
    auto note = [&](const pddl::Atom& a) { reg.note_use(a.predicate, action.name); };
    for (const auto& l : action.precondition) note(l.atom);
    std::for_each(action.add_effects.begin(), action.add_effects.end(), note);
    std::for_each(action.del_effects.begin(), action.del_effects.end(), note);
  }
  return reg;
}

const pddl::PredicateDef* PredicateRegistry::find(std::string_view name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& p) { return p.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

void PredicateRegistry::append(pddl::PredicateDef def, const std::string& origin_action) {
  if (!origin_action.empty()) note_use(def.name, origin_action);
  entries_.push_back(std::move(def));
}

void PredicateRegistry::replace(const pddl::PredicateDef& def) {
  for (auto& e : entries_) {
    if (e.name == def.name) {
      e = def;
      return;
    }
  }
  entries_.push_back(def);
}

void PredicateRegistry::note_use(const std::string& predicate, const std::string& action) {
  auto& list = origins_[predicate];
  if (std::find(list.begin(), list.end(), action) == list.end()) list.push_back(action);
}

std::vector<std::string> PredicateRegistry::origins(std::string_view predicate) const {
  auto it = origins_.find(std::string(predicate));
  return it == origins_.end() ? std::vector<std::string>{} : it->second;
}

std::string PredicateRegistry::render_for_prompt() const {
  if (entries_.empty()) return "No predicate has been defined yet";
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& p = entries_[i];
    out += std::to_string(i + 1) + ". " + pddl::signature(p) + ": " + p.description;
    if (i + 1 < entries_.size()) out += '\n';
  }
  return out;
}

std::string PredicateRegistry::to_text() const {
  std::string out;
  for (const auto& p : entries_) {
    out += pddl::signature(p);
    if (!p.description.empty()) out += " ; " + p.description;
    out += '\n';
  }
  return out;
}

PredicateRegistry PredicateRegistry::from_text(std::string_view text) {
  PredicateRegistry reg;
  std::vector<pddl::SExpr> roots;
  try {
    roots = pddl::read_sexprs(text);
  } catch (const pddl::SyntaxError& e) {
    throw CorruptRegistry(std::string("unreadable predicate list: ") + e.what());
  }
  for (const auto& decl : roots) {
    if (!decl.is_list || decl.items.empty() || decl.items.front().is_list) {
      throw CorruptRegistry("expected (name ?x - type ...) but found " + decl.to_string());
    }
    pddl::PredicateDef def;
    def.name = pddl::normalize_symbol(decl.items.front().atom);
    try {
      def.params = pddl::parse_typed_list(decl.items, 1, true);
    } catch (const pddl::PddlError& e) {
      throw CorruptRegistry(std::string("bad parameters for '") + def.name + "': " + e.what());
    }
    def.description = decl.trailing_comment;
    if (reg.find(def.name)) throw CorruptRegistry("predicate '" + def.name + "' listed twice");
    reg.entries_.push_back(std::move(def));
  }
  return reg;
}

}  // namespace llmpddl::builder
