#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmpddl/builder/registry.hpp"
#include "llmpddl/engine/state.hpp"
#include "llmpddl/llm/conversation.hpp"
#include "llmpddl/llm/template.hpp"
#include "llmpddl/llm/transport.hpp"
#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/planner/planner.hpp"

namespace llmpddl::orchestrator {

struct Instruction {
  std::string id;    // task id, used for conversation and run-log names
  std::string text;  // what the user asked for
  pddl::ProblemSpec context;  // objects and initial state; the goal is ignored
};

class UntranslatableGoal : public std::runtime_error {
 public:
  UntranslatableGoal(std::string reply, std::string violation);
  const std::string& reply() const { return reply_; }
  const std::string& violation() const { return violation_; }

 private:
  std::string reply_;
  std::string violation_;
};

// Shared plumbing for the LLM-facing steps.
struct Gateway {
  llm::Transport& transport;
  llm::TemplateSet templates;
  const llm::ConversationStore* store = nullptr;
  std::string domain_description;
};

// Asks for a goal and accepts it only when every predicate, object and type
// checks out against the domain and the instruction's objects.
std::vector<pddl::Literal> translate_goal(const Instruction& instr, const pddl::DomainModel& domain,
                                          const builder::PredicateRegistry& reg, Gateway& gateway);

// "- name - type" lines.
std::string render_objects(const std::vector<pddl::TypedName>& objects);

// One structured record per task run.
struct RunRecord {
  std::string task;
  std::string mode;  // classical | llm
  int rounds = 0;
  std::string outcome;
  pddl::Plan plan;
  double wall_seconds = 0;
  nlohmann::json detail = nlohmann::json::object();
};

nlohmann::json to_json(const RunRecord& r);
RunRecord run_from_json(const nlohmann::json& j);

struct PipelineResult {
  std::vector<pddl::Literal> goal;
  planner::PlanResult plan;
  std::optional<engine::ValidationReport> validation;  // set when a plan was found
  RunRecord record;
};

// Goal translation, then the planner. UntranslatableGoal and planner
// errors propagate; invalid_translation_record() turns the former into a
// run record.
PipelineResult classical_pipeline(const Instruction& instr, const pddl::DomainModel& domain,
                                  const builder::PredicateRegistry& reg, Gateway& gateway,
                                  const planner::SolveConfig& config = {});

RunRecord invalid_translation_record(const Instruction& instr, const std::string& mode, const UntranslatableGoal& e);

// Natural-language feedback for a failed validation; empty for valid plans.
std::string translate_validation_feedback(const engine::ValidationReport& report,
                                          const builder::PredicateRegistry& reg,
                                          const llm::TemplateSet& templates = {});

// Optional rewording of canonical feedback through the gateway. Live use only.
std::string polish_feedback(const std::string& feedback, const builder::PredicateRegistry& reg, Gateway& gateway);

struct ActionTranslation {
  std::optional<pddl::Plan> plan;
  std::string error;  // regeneration message when `plan` is unset
  int gateway_calls = 0;
};

// Reads an LLM planner completion line by line: exact form first, then a
// normalized form, then the action-translation prompt.
ActionTranslation translate_actions(const std::string& raw_plan, const pddl::DomainModel& domain,
                                    const std::vector<pddl::TypedName>& objects, Gateway* gateway = nullptr);

enum class LoopStatus { Success, Exhausted, InvalidTranslation };
std::string to_string(LoopStatus s);

struct LoopOutcome {
  LoopStatus status = LoopStatus::Exhausted;
  int rounds = 0;  // planner completions
  int feedback_messages = 0;
  bool duplicate_plan = false;  // some round repeated an earlier plan
  pddl::Plan plan;              // the last readable plan
  std::string transcript;       // conversation id
  std::vector<std::string> feedback;
};

struct LoopOptions {
  int cap = 8;
  std::vector<std::string> examples;  // two fixed examples per domain
};

// Back-prompting: plan, validate, feed the failure back, until the plan is
// valid or `cap` completions were spent.
LoopOutcome llm_plan_loop(const Instruction& instr, const pddl::DomainModel& domain,
                          const builder::PredicateRegistry& reg, Gateway& gateway, const LoopOptions& options = {});

// The planner prompt for an instruction (first user message of the loop).
std::string planner_prompt(const Instruction& instr, const pddl::DomainModel& domain,
                           const builder::PredicateRegistry& reg, const Gateway& gateway,
                           const std::vector<std::string>& examples);

// "do X before Y": the first step of `before` must precede the first step
// of `after`. A step matches when its action starts with the action prefix
// and it mentions the object (if given).
struct StepPattern {
  std::string action_prefix;
  std::string object;
};
struct OrderingConstraint {
  StepPattern before;
  StepPattern after;
};
// Constraints not met by the plan (including ones whose steps are missing).
std::vector<OrderingConstraint> check_orderings(const pddl::Plan& plan,
                                                const std::vector<OrderingConstraint>& constraints);

nlohmann::json to_json(const LoopOutcome& o);

}  // namespace llmpddl::orchestrator
