#include "llmpddl/audit/auditor.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "llmpddl/pddl/sexpr.hpp"

namespace llmpddl::audit {

namespace {

constexpr std::array kCategoryNames = {
    "unsupported-keyword",     "type-name-clash",       "predicate-name-clash",   "invalid-object-type",
    "predicate-usage-mismatch", "contradictory-effects", "redundant-precondition",
};

bool is_clash(Category c) { return c == Category::TypeNameClash || c == Category::PredicateNameClash; }

std::string clash_item(const pddl::PredicateDef& proposed, const pddl::PredicateDef& existing) {
  return pddl::signature(proposed) + ", " + proposed.description +
         " | existing predicate with the same name: " + pddl::signature(existing) + ", " + existing.description;
}

// Type whose name the predicate takes, compared after symbol normalization
// so `small_object` and `small-object` collide.
std::optional<std::string> clashing_type(const pddl::TypeHierarchy& types, const std::string& predicate) {
  for (const auto& t : types.types()) {
    if (pddl::normalize_symbol(t) == predicate) return t;
  }
  return std::nullopt;
}

void sort_by_category(std::vector<Finding>& findings) {
  std::stable_sort(findings.begin(), findings.end(),
                   [](const Finding& a, const Finding& b) { return a.category < b.category; });
}

}  // namespace

std::string to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (s == kCategoryNames[i]) return static_cast<Category>(i);
  }
  return std::nullopt;
}

bool AuditReport::has_blocking() const {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.blocking(); });
}

std::vector<Finding> AuditReport::of(Category c) const {
  std::vector<Finding> out;
  std::copy_if(findings.begin(), findings.end(), std::back_inserter(out),
               [&](const Finding& f) { return f.category == c; });
  return out;
}

std::string ordinal(std::size_t n) {
  static constexpr std::array words = {"first", "second", "third", "fourth", "fifth",
                                       "sixth", "seventh", "eighth", "ninth", "tenth"};
  if (n >= 1 && n <= words.size()) return words[n - 1];
  return std::to_string(n) + "th";
}

std::string with_article(std::string_view noun) {
  bool vowel = !noun.empty() && std::string_view("aeiouAEIOU").find(noun.front()) != std::string_view::npos;
  return (vowel ? "an " : "a ") + std::string(noun);
}

Auditor::Auditor(llm::TemplateSet templates, AuditOptions options)
    : templates_(std::move(templates)), options_(options) {}

std::string Auditor::clash_message(Category c, const std::vector<std::string>& items) const {
  std::string list;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) list += "; ";
    list += std::to_string(i + 1) + ". " + items[i];
  }
  const char* id = c == Category::TypeNameClash ? "feedback_type_name_clash" : "feedback_predicate_name_clash";
  return templates_.render(id, {{"items", list}});
}

AuditReport Auditor::audit_action(const pddl::ActionModel& model, const builder::PredicateRegistry& reg,
                                  const pddl::TypeHierarchy& types) const {
  return audit_action(ActionProposal{model, {}, {}}, reg, types);
}

AuditReport Auditor::audit_action(const ActionProposal& proposal, const builder::PredicateRegistry& reg,
                                  const pddl::TypeHierarchy& types) const {
  const pddl::ActionModel& m = proposal.model;
  std::vector<Finding> out;
  auto add = [&](Category c, std::string section, std::string snippet, std::string message, std::string item = {}) {
    out.push_back({c, {m.name, std::move(section), std::move(snippet)}, std::move(message), std::move(item)});
  };

  for (const auto& use : proposal.unsupported) {
    add(Category::UnsupportedKeyword, use.section, use.snippet,
        templates_.render("feedback_unsupported_keyword", {{"keyword", use.keyword}}));
  }

  std::map<std::string, const pddl::PredicateDef*> declared;
  for (const auto& p : reg.entries()) declared[p.name] = &p;
  std::set<std::string> proposed_names;
  for (const auto& p : proposal.new_predicates) {
    if (auto type = clashing_type(types, p.name)) {
      std::string item = "'" + *type + "'";
      add(Category::TypeNameClash, "new-predicates", pddl::signature(p), clash_message(Category::TypeNameClash, {item}),
          item);
    }
    const pddl::PredicateDef* existing = reg.find(p.name);
    if (!existing) {
      auto earlier = std::find_if(proposal.new_predicates.begin(), proposal.new_predicates.end(),
                                  [&](const pddl::PredicateDef& q) { return q.name == p.name; });
      if (&*earlier != &p) existing = &*earlier;
    }
    // Listing an existing predicate again, even verbatim, is reported too.
    if (existing) {
      std::string item = clash_item(p, *existing);
      add(Category::PredicateNameClash, "new-predicates", pddl::signature(p),
          clash_message(Category::PredicateNameClash, {item}), item);
    }
    if (proposed_names.insert(p.name).second) declared[p.name] = &p;
    for (const auto& param : p.params) {
      if (!types.contains(param.type)) {
        add(Category::InvalidObjectType, "new-predicates", pddl::signature(p),
            templates_.render("feedback_invalid_object_type", {{"type", param.type}, {"parameter", param.name}}));
      }
    }
  }

  for (const auto& param : m.params) {
    if (!types.contains(param.type)) {
      add(Category::InvalidObjectType, "parameters", param.name + " - " + param.type,
          templates_.render("feedback_invalid_object_type", {{"type", param.type}, {"parameter", param.name}}));
    }
  }

  auto check_usage = [&](const pddl::Atom& atom, const std::string& section, const std::string& snippet) {
    auto it = declared.find(atom.predicate);
    if (it == declared.end()) {
      add(Category::PredicateUsageMismatch, section, snippet,
          templates_.render("feedback_undefined_predicate", {{"predicate", atom.predicate}}), "undefined");
      return;
    }
    const pddl::PredicateDef& def = *it->second;
    if (def.params.size() != atom.args.size()) {
      add(Category::PredicateUsageMismatch, section, snippet,
          templates_.render("feedback_predicate_arity_mismatch", {{"predicate", atom.predicate},
                                                                  {"expected", std::to_string(def.params.size())},
                                                                  {"given", std::to_string(atom.args.size())}}),
          "arity");
      return;
    }
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      const pddl::TypedName* param = m.find_param(atom.args[i]);
      if (!param || !types.contains(param->type) || !types.contains(def.params[i].type)) continue;
      if (!types.is_subtype(param->type, def.params[i].type)) {
        add(Category::PredicateUsageMismatch, section, snippet,
            templates_.render("feedback_predicate_type_mismatch",
                              {{"ordinal", ordinal(i + 1)},
                               {"predicate", atom.predicate},
                               {"expected", with_article(*types.canonical(def.params[i].type))},
                               {"given", with_article(*types.canonical(param->type))}}),
            "type");
        return;
      }
    }
  };
  for (const auto& l : m.precondition) check_usage(l.atom, "precondition", pddl::to_string(l));
  for (const auto& a : m.add_effects) check_usage(a, "effect", pddl::to_string(a));
  for (const auto& a : m.del_effects) check_usage(a, "effect", "(not " + pddl::to_string(a) + ")");

  for (const auto& a : m.add_effects) {
    if (std::find(m.del_effects.begin(), m.del_effects.end(), a) != m.del_effects.end()) {
      add(Category::ContradictoryEffects, "effect", pddl::to_string(a),
          templates_.render("feedback_contradictory_effects", {{"literal", pddl::to_string(a)}}));
    }
  }

  if (options_.redundant_preconditions) {
    for (std::size_t i = 0; i < m.precondition.size(); ++i) {
      if (std::find(m.precondition.begin(), m.precondition.begin() + static_cast<std::ptrdiff_t>(i),
                    m.precondition[i]) != m.precondition.begin() + static_cast<std::ptrdiff_t>(i)) {
        std::string lit = pddl::to_string(m.precondition[i]);
        add(Category::RedundantPrecondition, "precondition", lit,
            templates_.render("feedback_redundant_precondition", {{"literal", lit}}));
      }
    }
  }

  sort_by_category(out);
  return {std::move(out)};
}

AuditReport Auditor::audit_domain(const pddl::DomainModel& domain,
                                  const std::vector<pddl::UnsupportedUse>& unsupported) const {
  std::vector<Finding> declarations;
  builder::PredicateRegistry reg;
  for (const auto& p : domain.predicates) {
    std::string snippet = pddl::signature(p);
    if (auto type = clashing_type(domain.types, p.name)) {
      std::string item = "'" + *type + "'";
      declarations.push_back({Category::TypeNameClash, {"", "predicates", snippet},
                              clash_message(Category::TypeNameClash, {item}), item});
    }
    if (const pddl::PredicateDef* existing = reg.find(p.name)) {
      std::string item = clash_item(p, *existing);
      declarations.push_back({Category::PredicateNameClash, {"", "predicates", snippet},
                              clash_message(Category::PredicateNameClash, {item}), item});
    } else {
      reg.append(p, "");
    }
    for (const auto& param : p.params) {
      if (!domain.types.contains(param.type)) {
        declarations.push_back(
            {Category::InvalidObjectType, {"", "predicates", snippet},
             templates_.render("feedback_invalid_object_type", {{"type", param.type}, {"parameter", param.name}}),
             {}});
      }
    }
  }
  sort_by_category(declarations);

  AuditReport report{std::move(declarations)};
  for (const auto& action : domain.actions) {
    ActionProposal proposal{action, {}, {}};
    for (const auto& use : unsupported) {
      if (use.action == action.name) proposal.unsupported.push_back(use);
    }
    auto r = audit_action(proposal, reg, domain.types);
    report.findings.insert(report.findings.end(), r.findings.begin(), r.findings.end());
  }
  return report;
}

AuditReport Auditor::audit_source(std::string_view domain_text) const {
  auto roots = pddl::read_sexprs(domain_text);
  if (roots.size() != 1) throw pddl::SyntaxError("expected exactly one (define (domain ...)) form", {1, 1}, "");
  std::vector<pddl::UnsupportedUse> unsupported;
  pddl::ParseOptions options;
  options.check_types = false;
  pddl::DomainModel domain = pddl::parse_domain(roots.front(), options, &unsupported);
  return audit_domain(domain, unsupported);
}

std::string Auditor::render_feedback(const std::vector<Finding>& findings) const {
  // Clash items of one category are merged into the message slot of the
  // first such finding.
  std::vector<std::string> messages;
  std::map<Category, std::pair<std::size_t, std::vector<std::string>>> merged;
  for (const auto& f : findings) {
    if (is_clash(f.category) && !f.item.empty()) {
      auto [it, fresh] = merged.try_emplace(f.category, messages.size(), std::vector<std::string>{});
      if (fresh) messages.emplace_back();
      it->second.second.push_back(f.item);
      continue;
    }
    messages.push_back(f.message);
  }
  for (const auto& [category, slot] : merged) messages[slot.first] = clash_message(category, slot.second);
  std::string out;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i) out += '\n';
    out += messages[i];
  }
  return out;
}

nlohmann::json to_json(const Finding& f) {
  return {{"category", to_string(f.category)},
          {"action", f.locus.action},
          {"section", f.locus.section},
          {"snippet", f.locus.snippet},
          {"message", f.message}};
}

nlohmann::json to_json(const AuditReport& r) {
  nlohmann::json findings = nlohmann::json::array();
  for (const auto& f : r.findings) findings.push_back(to_json(f));
  return {{"clean", r.clean()}, {"findings", findings}};
}

}  // namespace llmpddl::audit
