#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "llmpddl/builder/registry.hpp"
#include "llmpddl/llm/template.hpp"
#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/types.hpp"

namespace llmpddl::audit {

// Declaration order is the reporting order within an action.
enum class Category {
  UnsupportedKeyword,
  TypeNameClash,
  PredicateNameClash,
  InvalidObjectType,
  PredicateUsageMismatch,
  ContradictoryEffects,
  RedundantPrecondition,  // informational, off by default
};

std::string to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

struct Locus {
  std::string action;   // empty for domain-level declarations
  std::string section;  // parameters, precondition, effect, new-predicates, predicates
  std::string snippet;
};

struct Finding {
  Category category;
  Locus locus;
  std::string message;
  // Clash item for the batch renderer, or the usage-mismatch kind
  // (undefined, arity, type).
  std::string item;

  bool blocking() const { return category != Category::RedundantPrecondition; }
};

struct AuditReport {
  std::vector<Finding> findings;

  bool clean() const { return findings.empty(); }
  bool has_blocking() const;
  std::vector<Finding> of(Category c) const;
};

struct AuditOptions {
  bool redundant_preconditions = false;
};

// What one construction reply proposes for an action.
struct ActionProposal {
  pddl::ActionModel model;
  std::vector<pddl::PredicateDef> new_predicates;
  std::vector<pddl::UnsupportedUse> unsupported;
};

class Auditor {
 public:
  explicit Auditor(llm::TemplateSet templates = {}, AuditOptions options = {});

  // Checks one action against the registry it was built with; its new
  // predicates count as declared.
  AuditReport audit_action(const ActionProposal& proposal, const builder::PredicateRegistry& reg,
                           const pddl::TypeHierarchy& types) const;
  AuditReport audit_action(const pddl::ActionModel& model, const builder::PredicateRegistry& reg,
                           const pddl::TypeHierarchy& types) const;

  // Whole domain: declarations first, then every action in order.
  AuditReport audit_domain(const pddl::DomainModel& domain,
                           const std::vector<pddl::UnsupportedUse>& unsupported = {}) const;

  // Parses leniently (no usage checks, connectives collected) and audits.
  // Syntax errors still throw.
  AuditReport audit_source(std::string_view domain_text) const;

  // Feedback text for a batch: clash findings of one category merge into a
  // single numbered message; messages are joined by newlines.
  std::string render_feedback(const std::vector<Finding>& findings) const;
  std::string render_feedback(const AuditReport& report) const { return render_feedback(report.findings); }

 private:
  std::string clash_message(Category c, const std::vector<std::string>& items) const;

  llm::TemplateSet templates_;
  AuditOptions options_;
};

nlohmann::json to_json(const Finding& f);
nlohmann::json to_json(const AuditReport& r);

// "first", "second", ... then "11th".
std::string ordinal(std::size_t n);
// "a householdObject" / "an object".
std::string with_article(std::string_view noun);

}  // namespace llmpddl::audit
