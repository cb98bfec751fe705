#include "llmpddl/engine/state.hpp"

#include <algorithm>
#include <map>

namespace llmpddl::engine {

namespace {

std::string substitute(const std::string& term, const std::map<std::string, std::string>& binding) {
  auto it = binding.find(term);
  return it == binding.end() ? term : it->second;
}

Atom ground_atom(const Atom& atom, const std::map<std::string, std::string>& binding) {
  Atom out{atom.predicate, {}};
  for (const auto& a : atom.args) out.args.push_back(substitute(a, binding));
  return out;
}

std::vector<std::string> check_parameters(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                                          const pddl::PlanStep& step, const pddl::ActionModel* action) {
  if (!action) return {"unknown action '" + step.action + "'"};
  if (action->params.size() != step.args.size()) {
    return {"'" + action->name + "' takes " + std::to_string(action->params.size()) + " parameter(s) but " +
            std::to_string(step.args.size()) + " were given"};
  }
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < step.args.size(); ++i) {
    const auto& param = action->params[i];
    const pddl::TypedName* obj = problem.find_object(step.args[i]);
    if (!obj) {
      problems.push_back("unknown object '" + step.args[i] + "' for parameter " + param.name);
    } else if (!domain.types.contains(param.type) || !domain.types.contains(obj->type) ||
               !domain.types.is_subtype(obj->type, param.type)) {
      problems.push_back("parameter " + param.name + " of '" + action->name + "' must be of type " + param.type +
                         ", but '" + obj->name + "' is of type " + obj->type);
    }
  }
  return problems;
}

}  // namespace

State initial_state(const pddl::ProblemSpec& problem) {
  State s;
  s.facts.insert(problem.init.begin(), problem.init.end());
  return s;
}

std::string GroundAction::label() const { return pddl::to_string(pddl::PlanStep{schema, args}); }

GroundAction instantiate(const pddl::ActionModel& action, const std::vector<std::string>& args) {
  if (args.size() != action.params.size()) {
    throw std::invalid_argument("arity mismatch instantiating '" + action.name + "'");
  }
  std::map<std::string, std::string> binding;
  for (std::size_t i = 0; i < args.size(); ++i) binding[action.params[i].name] = args[i];
  GroundAction g;
  g.schema = action.name;
  g.args = args;
  for (const auto& l : action.precondition) g.precondition.push_back({l.positive, ground_atom(l.atom, binding)});
  for (const auto& e : action.constraints) {
    g.constraints.push_back({substitute(e.lhs, binding), substitute(e.rhs, binding), e.negated});
  }
  for (const auto& a : action.add_effects) g.add.push_back(ground_atom(a, binding));
  for (const auto& a : action.del_effects) g.del.push_back(ground_atom(a, binding));
  return g;
}

std::vector<std::string> Applicability::describe() const {
  std::vector<std::string> out;
  for (const auto& l : unmet) out.push_back(pddl::to_string(l));
  for (const auto& e : violated) out.push_back(pddl::to_string(e));
  return out;
}

Applicability applicability(const State& state, const GroundAction& action) {
  Applicability out;
  for (const auto& l : action.precondition) {
    if (state.holds(l.atom) != l.positive) out.unmet.push_back(l);
  }
  for (const auto& e : action.constraints) {
    if ((e.lhs == e.rhs) == e.negated) out.violated.push_back(e);
  }
  out.applicable = out.unmet.empty() && out.violated.empty();
  return out;
}

NotApplicable::NotApplicable(Applicability detail)
    : std::runtime_error("action not applicable"), detail_(std::move(detail)) {}

State apply(const State& state, const GroundAction& action) {
  Applicability check = applicability(state, action);
  if (!check.applicable) throw NotApplicable(std::move(check));
  State next = state;
  for (const auto& a : action.del) next.facts.erase(a);
  for (const auto& a : action.add) next.facts.insert(a);
  return next;
}

GoalCheck check_goal(const State& state, const std::vector<Literal>& goal) {
  GoalCheck out;
  for (const auto& l : goal) {
    if (state.holds(l.atom) != l.positive) out.unmet.push_back(l);
  }
  out.satisfied = out.unmet.empty();
  return out;
}

std::string to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::UnmetPrecondition:
      return "unmet-precondition";
    case FailureKind::InvalidParameter:
      return "invalid-parameter";
    case FailureKind::UnmetGoal:
      return "unmet-goal";
  }
  return "unknown";
}

ValidationReport validate_plan(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                               const pddl::Plan& plan) {
  ValidationReport report;
  State state = initial_state(problem);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const pddl::ActionModel* action = domain.find_action(step.action);
    auto problems = check_parameters(domain, problem, step, action);
    if (!problems.empty()) {
      report.valid = false;
      report.failures.push_back({i + 1, FailureKind::InvalidParameter, std::move(problems)});
      return report;
    }
    GroundAction g = instantiate(*action, step.args);
    Applicability check = applicability(state, g);
    if (!check.applicable) {
      report.valid = false;
      report.failures.push_back({i + 1, FailureKind::UnmetPrecondition, check.describe()});
      return report;
    }
    state = apply(state, g);
    report.steps_executed = i + 1;
  }
  GoalCheck goal = check_goal(state, problem.goal);
  if (!goal.satisfied) {
    report.valid = false;
    Failure f{plan.steps.size(), FailureKind::UnmetGoal, {}};
    for (const auto& l : goal.unmet) f.unmet.push_back(pddl::to_string(l));
    report.failures.push_back(std::move(f));
  }
  report.final_state = std::move(state);
  return report;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"step", f.step}, {"kind", to_string(f.kind)}, {"unmet", f.unmet}});
  }
  nlohmann::json out = {
      {"verdict", report.valid ? "valid" : "invalid"},
      {"failures", failures},
      {"steps_executed", report.steps_executed},
  };
  if (report.final_state) {
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& a : report.final_state->facts) facts.push_back(pddl::to_string(a));
    out["final_state"] = facts;
  } else {
    out["final_state"] = nullptr;
  }
  return out;
}

Localization localize_error(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                            const pddl::Plan& suggested) {
  Localization out;
  ValidationReport report = validate_plan(domain, problem, suggested);
  if (report.valid) return out;
  const Failure& f = report.failures.front();
  out.failing_step = f.step;
  out.unmet = f.unmet;
  for (std::size_t i = 0; i < f.step && i < suggested.steps.size(); ++i) {
    const auto& name = suggested.steps[i].action;
    if (std::find(out.suspect_actions.begin(), out.suspect_actions.end(), name) == out.suspect_actions.end()) {
      out.suspect_actions.push_back(name);
    }
  }
  return out;
}

nlohmann::json to_json(const Localization& localization) {
  nlohmann::json out = {{"unmet", localization.unmet}, {"suspect_actions", localization.suspect_actions}};
  out["failing_step"] = localization.failing_step ? nlohmann::json(*localization.failing_step) : nlohmann::json();
  return out;
}

}  // namespace llmpddl::engine
