#pragma once

#include <climits>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "llmpddl/pddl/ast.hpp"

namespace llmpddl::planner {

struct GroundOperator {
  std::string schema;
  std::vector<std::string> args;
  std::vector<int> pre;  // fact indices, negative preconditions as complement facts
  std::vector<int> add;
  std::vector<int> del;  // never overlaps add (delete-before-add)
};

// Facts are ground atoms; complement facts ("not-" prefix on the predicate)
// stand for negated atoms used in preconditions or goals.
struct GroundTask {
  std::vector<pddl::Atom> facts;
  std::vector<bool> complement;  // per fact
  std::vector<GroundOperator> operators;
  std::vector<int> init;      // sorted
  std::vector<int> goal;      // sorted, includes complement facts
  std::vector<int> neg_goal;  // positive facts that must be false

  std::optional<int> find(const pddl::Atom& atom, bool negated = false) const;

  std::unordered_map<std::string, int> index;
};

struct GroundOptions {
  std::size_t max_operators = 1'000'000;
  // Drop operators that are unreachable under the delete relaxation.
  bool prune_unreachable = false;
};

class GroundingExplosion : public std::runtime_error {
 public:
  explicit GroundingExplosion(std::size_t cap);
};

GroundTask ground(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                  const GroundOptions& options = {});

constexpr int kInfiniteCost = INT_MAX;

// Delete-relaxation fixpoints over unit action costs. `state` is a sorted
// list of true fact indices.
int h_add(const GroundTask& task, const std::vector<int>& state);
int h_max(const GroundTask& task, const std::vector<int>& state);

enum class Strategy { AStar, Gbfs, Bfs };
enum class Heuristic { HAdd, HMax, Blind };

struct SearchConfig {
  Strategy strategy = Strategy::Gbfs;
  Heuristic heuristic = Heuristic::HAdd;
  std::size_t max_expansions = 2'000'000;
  double time_limit = 60.0;  // seconds
};

enum class Outcome { Solved, Unsolvable, ResourceLimit };

std::string to_string(Outcome outcome);
std::string to_string(Strategy strategy);
std::string to_string(Heuristic heuristic);
Strategy parse_strategy(const std::string& text);
Heuristic parse_heuristic(const std::string& text);

struct SearchStats {
  std::size_t expansions = 0;
  std::size_t generated = 0;
  double wall_seconds = 0;
  std::size_t plan_length = 0;
};

struct PlanResult {
  Outcome outcome = Outcome::Unsolvable;
  pddl::Plan plan;
  SearchStats stats;
  std::string backend = "builtin";
};

nlohmann::json to_json(const PlanResult& result);

PlanResult search(const GroundTask& task, const SearchConfig& config);

struct SolveConfig {
  SearchConfig search;
  GroundOptions grounding;
  // Command template with {domain}, {problem} and {plan}; empty for the
  // built-in planner.
  std::string external_command;
};

class ExternalPlannerFailure : public std::runtime_error {
 public:
  ExternalPlannerFailure(const std::string& message, std::string output);
  const std::string& output() const { return output_; }

 private:
  std::string output_;
};

// Ground, search and re-validate. A plan that fails validation is a bug and
// throws std::logic_error.
PlanResult solve(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem, const SolveConfig& config = {});

}  // namespace llmpddl::planner
