#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmpddl/audit/auditor.hpp"
#include "llmpddl/builder/registry.hpp"
#include "llmpddl/llm/conversation.hpp"
#include "llmpddl/llm/template.hpp"
#include "llmpddl/llm/transport.hpp"
#include "llmpddl/pddl/ast.hpp"

namespace llmpddl::correction {

class MissingDescription : public std::runtime_error {
 public:
  explicit MissingDescription(std::string predicate);
  const std::string& predicate() const { return predicate_; }

 private:
  std::string predicate_;
};

// Plain-language rendering of an action, one sentence per parameter,
// precondition and effect, built from the predicate descriptions.
std::string render_model_nl(const pddl::ActionModel& model, const builder::PredicateRegistry& reg);

// One clause from a predicate description with the literal's arguments
// substituted: "true if the block ?x is clear" -> "the block ?b is clear".
std::string describe(const pddl::Atom& atom, const builder::PredicateRegistry& reg);

enum class Source { Auditor, Human, PlanValidation };
std::string to_string(Source s);
Source parse_source(const std::string& s);

struct LineDiff {
  std::vector<std::string> removed;
  std::vector<std::string> added;
  bool empty() const { return removed.empty() && added.empty(); }
};

// Line-level diff of two texts (longest common subsequence).
LineDiff diff_lines(const std::string& before, const std::string& after);

struct ModelRevision {
  int index = 0;
  std::string action;
  pddl::ActionModel before;
  pddl::ActionModel after;
  LineDiff diff;  // over canonical action text
  std::vector<pddl::PredicateDef> new_predicates;
  audit::AuditReport audit;  // of `after`
  bool introduced_new_errors = false;
};

struct FeedbackEvent {
  int index = 0;
  Source source = Source::Human;
  std::string action;
  std::string text;
  // Issue the message addresses; events about the same issue form a chain.
  // Defaults to a key unique to the event.
  std::string issue;
  // Whether the issue was gone after this event's revision. Auditor events
  // compute it; other sources say so when submitting.
  bool resolved = true;
  int revision = -1;
  bool introduced_new_errors = false;
};

struct LedgerCounts {
  int auditor = 0;
  int human = 0;
  int plan_validation = 0;
};

struct FeedbackLedger {
  std::map<std::string, LedgerCounts> per_action;
  int total_human_messages = 0;
  int errors_resolved = 0;
  int extra_rounds = 0;
};

FeedbackLedger feedback_ledger(const std::vector<FeedbackEvent>& events);

nlohmann::json to_json(const LineDiff& d);
nlohmann::json to_json(const ModelRevision& r);
nlohmann::json to_json(const FeedbackEvent& e);
FeedbackEvent event_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FeedbackLedger& l);

struct FeedbackRequest {
  Source source = Source::Human;
  std::string text;
  std::string issue;
  bool resolved = true;
};

// Continues construction dialogues with corrective feedback and keeps the
// event log. Not synchronized; callers serialize writers.
class CorrectionSession {
 public:
  CorrectionSession(pddl::DomainModel domain, builder::PredicateRegistry registry,
                    std::map<std::string, llm::Conversation> conversations, llm::Transport& transport,
                    llm::TemplateSet templates = {}, const llm::ConversationStore* store = nullptr,
                    int syntax_rounds = 3);

  // Appends the feedback to the action's dialogue, reads the revised model
  // and re-audits it. Throws std::out_of_range for unknown actions,
  // builder::ParseFailureAfterRetries and transport errors.
  ModelRevision apply_feedback(const std::string& action, const FeedbackRequest& request);

  // Audit findings of the action as a feedback request (empty text when
  // clean). The issue key names the findings so repeats chain up.
  FeedbackRequest auditor_feedback(const std::string& action) const;

  audit::AuditReport audit(const std::string& action) const;
  std::string render_nl(const std::string& action) const;

  const pddl::DomainModel& domain() const { return domain_; }
  const builder::PredicateRegistry& registry() const { return registry_; }
  const std::vector<FeedbackEvent>& events() const { return events_; }
  const std::vector<ModelRevision>& revisions() const { return revisions_; }
  const std::map<std::string, llm::Conversation>& conversations() const { return conversations_; }
  // Restores a persisted log; revisions are not replayed.
  void set_events(std::vector<FeedbackEvent> events) { events_ = std::move(events); }

 private:
  std::string conversation_for(const pddl::ActionModel& model) const;

  pddl::DomainModel domain_;
  builder::PredicateRegistry registry_;
  std::map<std::string, llm::Conversation> conversations_;
  llm::Transport& transport_;
  llm::TemplateSet templates_;
  audit::Auditor auditor_;
  const llm::ConversationStore* store_;
  int syntax_rounds_;
  std::vector<FeedbackEvent> events_;
  std::vector<ModelRevision> revisions_;
};

}  // namespace llmpddl::correction
