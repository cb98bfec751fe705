#include <cctype>

#include "llmpddl/audit/auditor.hpp"
#include "llmpddl/correction/correction.hpp"

namespace llmpddl::correction {

namespace {

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

enum class Mood { Required, Forbidden, Added, Removed };

// Rewrites the first " is " / " are " of a clause into the mood's modal
// form; clauses without one get a fixed lead-in.
std::string modal(const std::string& clause, Mood mood) {
  static const char* forms[][2] = {
      {"must be", "it must be true that "},
      {"must not be", "it must not be true that "},
      {"will be", "it will be true that "},
      {"will no longer be", "it will no longer be true that "},
  };
  const auto& [verb, lead] = forms[static_cast<int>(mood)];
  for (const char* copula : {" is ", " are "}) {
    auto at = clause.find(copula);
    if (at != std::string::npos) {
      return clause.substr(0, at) + " " + verb + " " + clause.substr(at + std::string(copula).size());
    }
  }
  return lead + clause;
}

std::string sentence(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (s.empty() || s.back() != '.') s += '.';
  return s;
}

}  // namespace

MissingDescription::MissingDescription(std::string predicate)
    : std::runtime_error("predicate '" + predicate + "' has no description"), predicate_(std::move(predicate)) {}

std::string describe(const pddl::Atom& atom, const builder::PredicateRegistry& reg) {
  const pddl::PredicateDef* def = reg.find(atom.predicate);
  if (!def || def->description.empty()) throw MissingDescription(atom.predicate);
  std::string text = def->description;
  if (pddl::to_lower(text.substr(0, 8)) == "true if ") text = text.substr(8);
  while (!text.empty() && (text.back() == '.' || text.back() == ' ')) text.pop_back();
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '?') {
      out += text[i++];
      continue;
    }
    std::size_t end = i + 1;
    while (end < text.size() && is_name_char(text[end])) ++end;
    std::string var = pddl::to_lower(text.substr(i, end - i));
    std::string replacement = text.substr(i, end - i);
    for (std::size_t k = 0; k < def->params.size() && k < atom.args.size(); ++k) {
      if (def->params[k].name == var) replacement = atom.args[k];
    }
    out += replacement;
    i = end;
  }
  return out;
}

std::string render_model_nl(const pddl::ActionModel& model, const builder::PredicateRegistry& reg) {
  std::string out = "Action: " + model.name + "\n";
  if (model.params.empty()) {
    out += "This action has no parameters.\n";
  } else {
    out += "Parameters:\n";
    for (const auto& p : model.params) out += "- " + p.name + " is " + audit::with_article(p.type) + ".\n";
  }
  if (model.precondition.empty() && model.constraints.empty()) {
    out += "This action has no preconditions.\n";
  } else {
    out += "Preconditions:\n";
    for (const auto& l : model.precondition) {
      out += "- " + sentence(modal(describe(l.atom, reg), l.positive ? Mood::Required : Mood::Forbidden)) + "\n";
    }
    for (const auto& e : model.constraints) {
      out += "- " + e.lhs + " and " + e.rhs + (e.negated ? " must be different.\n" : " must be the same.\n");
    }
  }
  if (model.add_effects.empty() && model.del_effects.empty()) {
    out += "This action has no effects.\n";
  } else {
    out += "Effects:\n";
    for (const auto& a : model.add_effects) out += "- " + sentence(modal(describe(a, reg), Mood::Added)) + "\n";
    for (const auto& a : model.del_effects) out += "- " + sentence(modal(describe(a, reg), Mood::Removed)) + "\n";
  }
  return out;
}

}  // namespace llmpddl::correction
