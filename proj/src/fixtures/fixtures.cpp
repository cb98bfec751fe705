#include "llmpddl/fixtures/fixtures.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "llmpddl/builder/authoring.hpp"
#include "llmpddl/builder/construction.hpp"
#include "llmpddl/correction/correction.hpp"
#include "llmpddl/orchestrator/orchestrator.hpp"
#include "llmpddl/pddl/action_block.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "llmpddl/pddl/sexpr.hpp"
#include "llmpddl/planner/planner.hpp"
#include "llmpddl/workspace/generators.hpp"
#include "llmpddl/workspace/project.hpp"

namespace llmpddl::fixtures {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("fixture build: " + what);
}

pddl::ActionModel without_provenance(pddl::ActionModel a) {
  a.provenance.clear();
  return a;
}

std::string fenced_goal(const std::vector<pddl::Literal>& goal) {
  std::string out = "```\n(and";
  for (const auto& l : goal) out += " " + pddl::to_string(l);
  return out + ")\n```";
}

// Replay looks replies up by prompt digest, so two prompts that coincide
// must have been answered alike.
void check_unambiguous(const fs::path& dir) {
  std::map<std::string, std::string> seen;
  for (const auto& e : fs::directory_iterator(dir)) {
    for (const auto& r : llm::read_cassette(e.path())) {
      auto [it, fresh] = seen.emplace(r.digest, r.response);
      expect(fresh || it->second == r.response, "two different replies recorded for one prompt: " + r.prompt_head);
    }
  }
}

}  // namespace

void build_project(const fs::path& fixture_dir, const fs::path& out) {
  const pddl::DomainModel reference = pddl::parse_domain(read(fixture_dir / "domain.pddl"));
  const json desc = json::parse(read(fixture_dir / "descriptions.json"));

  workspace::ProjectConfig config;
  config.name = desc.at("name").get<std::string>();
  config.domain_description = desc.at("domain_description").get<std::string>();
  for (const auto& t : reference.types.types()) config.types.emplace_back(t, *reference.types.parent(t));
  for (const auto& a : desc.at("actions")) {
    config.actions.push_back(
        {a.at("name").get<std::string>(), a.at("description").get<std::string>(), a.value("extra_info", std::string())});
  }
  config.planner_examples = desc.at("planner_examples").get<std::vector<std::string>>();
  config.transport.mode = "replay";
  config.transport.cassettes = {"cassettes/construction.jsonl", "cassettes/goals.jsonl"};
  if (desc.contains("corrections")) config.transport.cassettes.push_back("cassettes/corrections.jsonl");
  if (desc.contains("llm_plan_demos")) config.transport.cassettes.push_back("cassettes/llm-plan.jsonl");

  fs::remove_all(out);
  auto project = workspace::init(out, config);
  const auto& layout = project.layout;
  llm::ConversationStore store(layout.conversations());

  // The construction replies describe the reference actions, except for
  // the factual errors the draft is meant to carry.
  pddl::DomainModel intended = reference;
  for (const auto& e : desc.value("draft_errors", json::array())) {
    auto* a = intended.find_action(e.at("action").get<std::string>());
    expect(a, "unknown action in draft_errors");
    auto atom = pddl::read_sexpr(e.at("drop_delete").get<std::string>());
    pddl::Atom drop{atom.items[0].atom, {}};
    for (std::size_t i = 1; i < atom.items.size(); ++i) drop.args.push_back(atom.items[i].atom);
    std::erase(a->del_effects, drop);
  }
  std::vector<std::string> replies;
  std::set<std::string> known;
  for (int pass = 1; pass <= 2; ++pass) {
    for (const auto& a : config.actions) {
      replies.push_back(builder::author_reply(*intended.find_action(a.name), intended, known));
    }
  }
  llm::ScriptedTransport script(replies);
  llm::RecordingTransport construction_tape(script, layout.cassettes() / "construction.jsonl");
  builder::ConstructionSession session(config, construction_tape, project.templates(), &store);
  auto built = session.build_domain();
  expect(script.remaining() == 0, "construction used fewer replies than scripted");
  for (const auto& a : intended.actions) {
    const auto* got = built.draft.find_action(a.name);
    expect(got && without_provenance(*got) == a, "constructed action differs from the script: " + a.name);
  }
  project.draft = built.draft;
  project.registry = built.registry;
  workspace::save(project);

  // Corrections are recorded against the draft but not applied to the
  // shipped project; replaying them is left to the user.
  if (desc.contains("corrections")) {
    llm::ScriptedTransport fix;
    llm::RecordingTransport tape(fix, layout.cassettes() / "corrections.jsonl");
    correction::CorrectionSession corr(built.draft, built.registry, session.conversations(), tape, project.templates());
    for (const auto& c : desc.at("corrections")) {
      std::string action = c.at("action").get<std::string>();
      fix.push(pddl::print_action_block(*reference.find_action(action), {}));
      auto rev = corr.apply_feedback(action, {correction::Source::Human, c.at("feedback").get<std::string>(), "", true});
      expect(!rev.diff.empty(), "correction of " + action + " changed nothing");
    }
  }

  const auto& t = desc.at("tasks");
  auto tasks = workspace::generate_tasks(config.name, t.at("seed").get<std::uint32_t>(), t.at("count").get<int>());
  workspace::save_tasks(project, tasks);

  std::map<std::string, std::string> seeded;
  for (const auto& e : desc.value("seeded_goal_errors", json::array())) {
    seeded[e.at("task").get<std::string>()] = e.at("reply").get<std::string>();
  }
  {
    llm::ScriptedTransport goals;
    llm::RecordingTransport tape(goals, layout.cassettes() / "goals.jsonl");
    orchestrator::Gateway gateway{tape, project.templates(), nullptr, config.domain_description};
    for (const auto& task : tasks) {
      auto it = seeded.find(task.id);
      goals.push(it != seeded.end() ? it->second : fenced_goal(task.problem.goal));
      orchestrator::Instruction instr{task.id, task.instruction, task.problem};
      instr.context.goal.clear();
      try {
        auto goal = orchestrator::translate_goal(instr, built.draft, built.registry, gateway);
        expect(it == seeded.end() && goal == task.problem.goal, "goal translation of " + task.id);
      } catch (const orchestrator::UntranslatableGoal&) {
        expect(it != seeded.end(), "reference goal of " + task.id + " rejected");
      }
    }
  }

  // Back-prompting demos: the scripted planner first leaves out a step,
  // then answers with the planner's plan.
  int demos = desc.value("llm_plan_demos", 0);
  if (demos > 0) {
    llm::ScriptedTransport planner_script;
    llm::RecordingTransport tape(planner_script, layout.cassettes() / "llm-plan.jsonl");
    orchestrator::Gateway gateway{tape, project.templates(), nullptr, config.domain_description};
    for (int i = 0; i < demos && i < static_cast<int>(tasks.size()); ++i) {
      const auto& task = tasks[i];
      auto solved = planner::solve(built.draft, task.problem, config.planner);
      expect(solved.plan.steps.size() >= 2, "demo task " + task.id + " needs a longer plan");
      pddl::Plan broken = solved.plan;
      broken.steps.erase(broken.steps.begin() + 1);
      planner_script.push(fenced_goal(task.problem.goal));
      planner_script.push(pddl::print_plan(broken));
      planner_script.push(pddl::print_plan(solved.plan));
      orchestrator::Instruction instr{task.id, task.instruction, task.problem};
      instr.context.goal.clear();
      auto outcome = orchestrator::llm_plan_loop(instr, built.draft, built.registry, gateway,
                                                 {config.feedback_cap, config.planner_examples});
      expect(outcome.status == orchestrator::LoopStatus::Success && outcome.rounds == 2,
             "back-prompting demo " + task.id);
    }
  }
  check_unambiguous(layout.cassettes());
}

}  // namespace llmpddl::fixtures
