#include <chrono>

#include "llmpddl/orchestrator/orchestrator.hpp"
#include "llmpddl/pddl/action_block.hpp"
#include "llmpddl/pddl/errors.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/sexpr.hpp"
#include "internal.hpp"

namespace llmpddl::orchestrator {

UntranslatableGoal::UntranslatableGoal(std::string reply, std::string violation)
    : std::runtime_error("goal translation rejected: " + violation),
      reply_(std::move(reply)),
      violation_(std::move(violation)) {}

std::string detail::fresh_id(const llm::ConversationStore* store, const std::string& base) {
  if (!store || !store->exists(base)) return base;
  for (int n = 2;; ++n) {
    std::string id = base + "-" + std::to_string(n);
    if (!store->exists(id)) return id;
  }
}

std::string render_objects(const std::vector<pddl::TypedName>& objects) {
  std::string out;
  for (const auto& o : objects) out += "- " + o.name + " - " + o.type + "\n";
  return out;
}

std::vector<pddl::Literal> translate_goal(const Instruction& instr, const pddl::DomainModel& domain,
                                          const builder::PredicateRegistry& reg, Gateway& gateway) {
  llm::Conversation conv{detail::fresh_id(gateway.store, "goal-" + instr.id), {"goal-translation"}, {}};
  conv.add(llm::Role::User, gateway.templates.render("goal_translation", {{"domain_description", gateway.domain_description},
                                                                          {"predicate_list", reg.render_for_prompt()},
                                                                          {"objects", render_objects(instr.context.objects)},
                                                                          {"instruction", instr.text}}));
  std::string reply = llm::complete(conv, gateway.transport).content;
  if (gateway.store) gateway.store->persist(conv);

  std::string snippet = pddl::extract_snippet(reply);
  if (snippet.empty()) throw UntranslatableGoal(reply, "the reply contains no PDDL expression");
  // Predicates are checked against the registry, not the domain text.
  pddl::DomainModel view = domain;
  view.predicates = reg.entries();
  try {
    auto goal = pddl::parse_goal(pddl::read_sexpr(snippet), view, instr.context.objects);
    if (goal.empty()) throw UntranslatableGoal(reply, "the goal is empty");
    return goal;
  } catch (const pddl::PddlError& e) {
    throw UntranslatableGoal(reply, e.what());
  }
}

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.plan.steps) steps.push_back(pddl::to_string(s));
  return {{"task", r.task},   {"mode", r.mode},           {"rounds", r.rounds}, {"outcome", r.outcome},
          {"plan", steps},    {"wall_seconds", r.wall_seconds}, {"detail", r.detail}};
}

RunRecord run_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.task = j.at("task").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.rounds = j.at("rounds").get<int>();
  r.outcome = j.at("outcome").get<std::string>();
  std::string text;
  for (const auto& s : j.at("plan")) text += s.get<std::string>() + "\n";
  r.plan = pddl::parse_plan(text);
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.detail = j.value("detail", nlohmann::json::object());
  return r;
}

RunRecord invalid_translation_record(const Instruction& instr, const std::string& mode, const UntranslatableGoal& e) {
  RunRecord r;
  r.task = instr.id;
  r.mode = mode;
  r.outcome = "invalid-translation";
  r.detail = {{"violation", e.violation()}, {"reply", e.reply()}};
  return r;
}

PipelineResult classical_pipeline(const Instruction& instr, const pddl::DomainModel& domain,
                                  const builder::PredicateRegistry& reg, Gateway& gateway,
                                  const planner::SolveConfig& config) {
  auto start = std::chrono::steady_clock::now();
  PipelineResult out;
  out.goal = translate_goal(instr, domain, reg, gateway);
  pddl::ProblemSpec problem = instr.context;
  problem.goal = out.goal;
  out.plan = planner::solve(domain, problem, config);
  if (out.plan.outcome == planner::Outcome::Solved) out.validation = engine::validate_plan(domain, problem, out.plan.plan);

  auto& r = out.record;
  r.task = instr.id;
  r.mode = "classical";
  r.outcome = out.plan.outcome == planner::Outcome::Solved ? "success" : planner::to_string(out.plan.outcome);
  r.plan = out.plan.plan;
  nlohmann::json goal = nlohmann::json::array();
  for (const auto& l : out.goal) goal.push_back(pddl::to_string(l));
  r.detail = {{"goal", goal}, {"planner", planner::to_json(out.plan)}};
  if (out.validation) r.detail["valid"] = out.validation->valid;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace llmpddl::orchestrator
