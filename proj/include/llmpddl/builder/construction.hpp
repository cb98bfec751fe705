#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "llmpddl/audit/auditor.hpp"
#include "llmpddl/builder/registry.hpp"
#include "llmpddl/llm/conversation.hpp"
#include "llmpddl/llm/template.hpp"
#include "llmpddl/llm/transport.hpp"
#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/workspace/config.hpp"

namespace llmpddl::builder {

// No reply in the dialogue could be read as an action block.
class ParseFailureAfterRetries : public std::runtime_error {
 public:
  ParseFailureAfterRetries(std::string action, int attempts, const std::string& last_error);
  const std::string& action() const { return action_; }

 private:
  std::string action_;
};

struct MergeResult {
  PredicateRegistry registry;
  std::vector<audit::Finding> collisions;
};

// Appends predicates with fresh names. Names already taken by a predicate
// or a type are left out and come back as clash findings.
MergeResult merge_predicates(const PredicateRegistry& reg, const std::vector<pddl::PredicateDef>& proposed,
                             const std::string& action, const pddl::TypeHierarchy& types,
                             const audit::Auditor& auditor = audit::Auditor());

struct ConstructedAction {
  int pass = 1;
  std::string conversation_id;
  pddl::ActionModel model;  // provenance: "<conversation id>:<message index>"
  std::vector<pddl::PredicateDef> new_predicates;
  int syntax_rounds = 0;  // automatic feedback messages sent
  audit::AuditReport remaining;  // findings left for the correction loop
};

struct HistoryEntry {
  ConstructedAction step;
  PredicateRegistry registry;  // snapshot after merging this step
};

struct BuildResult {
  pddl::DomainModel draft;
  PredicateRegistry registry;
  std::vector<HistoryEntry> history;  // pass 1 then pass 2, in action order
};

class ConstructionSession {
 public:
  ConstructionSession(workspace::ProjectConfig config, llm::Transport& transport, llm::TemplateSet templates = {},
                      const llm::ConversationStore* store = nullptr);

  std::string prompt(const workspace::ActionDescription& action, const PredicateRegistry& reg) const;

  // One dialogue: prompt, parse, automatic syntax feedback for up to
  // `syntax_rounds` further replies.
  ConstructedAction construct_action(const workspace::ActionDescription& action, const PredicateRegistry& reg,
                                     int pass = 1);

  BuildResult build_domain();

  const std::map<std::string, llm::Conversation>& conversations() const { return conversations_; }
  const workspace::ProjectConfig& config() const { return config_; }

 private:
  workspace::ProjectConfig config_;
  pddl::TypeHierarchy types_;
  llm::Transport& transport_;
  llm::TemplateSet templates_;
  audit::Auditor auditor_;
  const llm::ConversationStore* store_;
  std::map<std::string, llm::Conversation> conversations_;
};

std::string conversation_id(int pass, const std::string& action);

// Findings the construction dialogue answers on its own: unsupported
// keywords, name clashes, invalid types and undefined predicates.
bool is_auto_feedback(const audit::Finding& f);

}  // namespace llmpddl::builder
