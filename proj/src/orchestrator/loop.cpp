#include <set>

#include "llmpddl/correction/correction.hpp"
#include "llmpddl/orchestrator/orchestrator.hpp"
#include "internal.hpp"

namespace llmpddl::orchestrator {

std::string to_string(LoopStatus s) {
  switch (s) {
    case LoopStatus::Success:
      return "success";
    case LoopStatus::Exhausted:
      return "exhausted";
    case LoopStatus::InvalidTranslation:
      return "invalid-translation";
  }
  return "?";
}

std::string planner_prompt(const Instruction& instr, const pddl::DomainModel& domain,
                           const builder::PredicateRegistry& reg, const Gateway& gateway,
                           const std::vector<std::string>& examples) {
  std::string actions;
  for (const auto& a : domain.actions) {
    if (!actions.empty()) actions += "\n";
    actions += correction::render_model_nl(a, reg);
  }
  std::string shown;
  for (const auto& e : examples) {
    if (!shown.empty()) shown += "\n\n";
    shown += e;
  }
  std::string init;
  for (const auto& f : instr.context.init) {
    std::string c;
    try {
      c = correction::describe(f, reg);
    } catch (const correction::MissingDescription&) {
      c = pddl::to_string(f);
    }
    init += "- " + c + "\n";
  }
  return gateway.templates.render("llm_planner", {{"domain_description", gateway.domain_description},
                                                  {"action_descriptions", actions},
                                                  {"examples", shown},
                                                  {"objects", render_objects(instr.context.objects)},
                                                  {"initial_state", init},
                                                  {"instruction", instr.text}});
}

LoopOutcome llm_plan_loop(const Instruction& instr, const pddl::DomainModel& domain,
                          const builder::PredicateRegistry& reg, Gateway& gateway, const LoopOptions& options) {
  LoopOutcome out;
  pddl::ProblemSpec problem = instr.context;
  try {
    problem.goal = translate_goal(instr, domain, reg, gateway);
  } catch (const UntranslatableGoal& e) {
    out.status = LoopStatus::InvalidTranslation;
    out.feedback.push_back(e.violation());
    return out;
  }

  llm::Conversation conv{detail::fresh_id(gateway.store, "llm-plan-" + instr.id), {"llm-planner"}, {}};
  out.transcript = conv.id;
  conv.add(llm::Role::User, planner_prompt(instr, domain, reg, gateway, options.examples));
  std::set<std::vector<pddl::PlanStep>> seen;
  while (out.rounds < options.cap) {
    std::string reply = llm::complete(conv, gateway.transport).content;
    ++out.rounds;
    if (gateway.store) gateway.store->persist(conv);
    auto tr = translate_actions(reply, domain, problem.objects, &gateway);
    std::string feedback;
    if (!tr.plan) {
      feedback = tr.error;
    } else {
      out.plan = *tr.plan;
      if (!seen.insert(out.plan.steps).second) out.duplicate_plan = true;
      auto report = engine::validate_plan(domain, problem, out.plan);
      if (report.valid) {
        out.status = LoopStatus::Success;
        return out;
      }
      feedback = translate_validation_feedback(report, reg, gateway.templates);
    }
    if (out.rounds == options.cap) break;
    conv.add(llm::Role::User, feedback);
    out.feedback.push_back(feedback);
    ++out.feedback_messages;
  }
  if (gateway.store) gateway.store->persist(conv);
  out.status = LoopStatus::Exhausted;
  return out;
}

std::vector<OrderingConstraint> check_orderings(const pddl::Plan& plan,
                                                const std::vector<OrderingConstraint>& constraints) {
  auto first = [&](const StepPattern& p) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
      const auto& s = plan.steps[i];
      if (!s.action.starts_with(p.action_prefix)) continue;
      if (p.object.empty() || std::find(s.args.begin(), s.args.end(), p.object) != s.args.end()) return i;
    }
    return std::nullopt;
  };
  std::vector<OrderingConstraint> broken;
  for (const auto& c : constraints) {
    auto b = first(c.before);
    auto a = first(c.after);
    if (!b || !a || *b >= *a) broken.push_back(c);
  }
  return broken;
}

nlohmann::json to_json(const LoopOutcome& o) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : o.plan.steps) steps.push_back(pddl::to_string(s));
  return {{"status", to_string(o.status)},
          {"rounds", o.rounds},
          {"feedback_messages", o.feedback_messages},
          {"duplicate_plan", o.duplicate_plan},
          {"plan", steps},
          {"transcript", o.transcript},
          {"feedback", o.feedback}};
}

}  // namespace llmpddl::orchestrator
