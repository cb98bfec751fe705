#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmpddl/pddl/ast.hpp"

namespace llmpddl::engine {

using pddl::Atom;
using pddl::Literal;

// Closed world: a fact is true iff it is in `facts`.
struct State {
  std::set<Atom> facts;

  bool holds(const Atom& atom) const { return facts.count(atom) > 0; }
  friend bool operator==(const State&, const State&) = default;
};

State initial_state(const pddl::ProblemSpec& problem);

struct GroundAction {
  std::string schema;
  std::vector<std::string> args;  // in parameter order
  std::vector<Literal> precondition;
  std::vector<pddl::Equality> constraints;
  std::vector<Atom> add;
  std::vector<Atom> del;

  std::string label() const;  // "(schema a b)"
};

// Substitutes `args` for the parameters of `action`. Arity must match.
GroundAction instantiate(const pddl::ActionModel& action, const std::vector<std::string>& args);

struct Applicability {
  bool applicable = true;
  std::vector<Literal> unmet;
  std::vector<pddl::Equality> violated;  // ground inequality constraints that fail

  // Unmet literals then violated constraints, as PDDL text.
  std::vector<std::string> describe() const;
};

Applicability applicability(const State& state, const GroundAction& action);

class NotApplicable : public std::runtime_error {
 public:
  explicit NotApplicable(Applicability detail);
  const Applicability& detail() const { return detail_; }

 private:
  Applicability detail_;
};

// (s \ del) ∪ add. Throws NotApplicable.
State apply(const State& state, const GroundAction& action);

struct GoalCheck {
  bool satisfied = true;
  std::vector<Literal> unmet;
};

GoalCheck check_goal(const State& state, const std::vector<Literal>& goal);

enum class FailureKind { UnmetPrecondition, InvalidParameter, UnmetGoal };

std::string to_string(FailureKind kind);

struct Failure {
  std::size_t step = 0;  // 1-based; the plan length for unmet goals
  FailureKind kind = FailureKind::UnmetPrecondition;
  std::vector<std::string> unmet;  // literals, or parameter diagnostics
};

struct ValidationReport {
  bool valid = true;
  std::vector<Failure> failures;
  std::size_t steps_executed = 0;
  std::optional<State> final_state;  // set when every step was applied
};

ValidationReport validate_plan(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                               const pddl::Plan& plan);

nlohmann::json to_json(const ValidationReport& report);

struct Localization {
  std::optional<std::size_t> failing_step;  // 1-based
  std::vector<std::string> unmet;
  std::vector<std::string> suspect_actions;  // distinct schemas up to the failing step
};

Localization localize_error(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                            const pddl::Plan& suggested);

nlohmann::json to_json(const Localization& localization);

}  // namespace llmpddl::engine
