#include <random>

#include "doctest.h"
#include "llmpddl/orchestrator/orchestrator.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "support.hpp"

using namespace llmpddl;
using orchestrator::Gateway;
using orchestrator::Instruction;
using orchestrator::LoopStatus;

namespace {

// Two cities with two locations each; l2 and l4 are the airports.
pddl::ProblemSpec logistics_context() {
  pddl::ProblemSpec p;
  p.name = "lg";
  p.domain = "logistics";
  p.objects = {{"p1", "package"}, {"t1", "truck"}, {"t2", "truck"}, {"a1", "plane"}, {"l1", "location"},
               {"l2", "location"}, {"l3", "location"}, {"l4", "location"}, {"c1", "city"},    {"c2", "city"}};
  p.init = {{"package-at", {"p1", "l1"}},       {"truck-at", {"t1", "l1"}},          {"truck-at", {"t2", "l3"}},
            {"plane-at", {"a1", "l2"}},         {"location-in-city", {"l1", "c1"}}, {"location-in-city", {"l2", "c1"}},
            {"location-in-city", {"l3", "c2"}}, {"location-in-city", {"l4", "c2"}}, {"airport", {"l2"}},
            {"airport", {"l4"}}};
  return p;
}

const char* kGoalReply = "The goal is:\n```\n(and (package-at p1 l4))\n```";

const char* kGoodPlan =
    "(load-truck p1 t1 l1)\n(drive-truck t1 l1 l2 c1)\n(unload-truck p1 t1 l2)\n(load-airplane p1 a1 l2)\n"
    "(fly-airplane a1 l2 l4)\n(unload-airplane p1 a1 l4)\n";

// Forgets to drive the truck: step 2 unloads at l2 while the truck is at l1.
const char* kBadPlan =
    "(load-truck p1 t1 l1)\n(unload-truck p1 t1 l2)\n(load-airplane p1 a1 l2)\n(fly-airplane a1 l2 l4)\n"
    "(unload-airplane p1 a1 l4)\n";

struct Setup {
  pddl::DomainModel domain = testsupport::domain("logistics");
  builder::PredicateRegistry reg = builder::PredicateRegistry::from_domain(domain);
  Instruction instr{"lg-1", "package p1 to the airport of city c2", logistics_context()};
};

pddl::ProblemSpec with_goal(pddl::ProblemSpec p, std::vector<pddl::Literal> goal) {
  p.goal = std::move(goal);
  return p;
}

}  // namespace

TEST_CASE("translate_goal accepts a checked conjunction") {
  Setup s;
  llm::ScriptedTransport t({kGoalReply});
  Gateway g{t};
  auto goal = orchestrator::translate_goal(s.instr, s.domain, s.reg, g);
  REQUIRE(goal.size() == 1);
  CHECK(goal[0] == pddl::Literal{true, {"package-at", {"p1", "l4"}}});
}

TEST_CASE("translate_goal rejects what does not check out") {
  Setup s;
  struct Case {
    const char* reply;
    const char* violation;
  };
  for (const Case c : {Case{"(and (package-delivered p1))", "package-delivered"}, Case{"(and (package-at p9 l4))", "p9"},
                       Case{"(and (package-at t1 l4))", "t1"}, Case{"(and (package-at p1))", "argument"},
                       Case{"(and (package-at ?p l4))", "ground"}, Case{"I cannot do that.", "no PDDL"},
                       Case{"(and)", "empty"}}) {
    CAPTURE(c.reply);
    llm::ScriptedTransport t({c.reply});
    Gateway g{t};
    try {
      orchestrator::translate_goal(s.instr, s.domain, s.reg, g);
      FAIL("accepted");
    } catch (const orchestrator::UntranslatableGoal& e) {
      CHECK(e.reply() == c.reply);
      CHECK(e.violation().find(c.violation) != std::string::npos);
    }
  }
  // The registry, not the domain text, decides which predicates exist.
  auto reg = builder::PredicateRegistry::from_text("(truck-at ?t - truck ?l - location) ; true if the truck ?t is at ?l\n");
  llm::ScriptedTransport t({kGoalReply});
  Gateway g{t};
  CHECK_THROWS_AS(orchestrator::translate_goal(s.instr, s.domain, reg, g), orchestrator::UntranslatableGoal);
}

TEST_CASE("translate_goal prompt and transcript") {
  Setup s;
  auto dir = testsupport::scratch("orch_goal");
  llm::ConversationStore store(dir);
  llm::ScriptedTransport t({kGoalReply, kGoalReply});
  Gateway g{t, {}, &store, "a logistics domain"};
  orchestrator::translate_goal(s.instr, s.domain, s.reg, g);
  orchestrator::translate_goal(s.instr, s.domain, s.reg, g);
  auto conv = store.load("goal-lg-1");
  REQUIRE(conv.messages.size() == 2);
  const auto& prompt = conv.messages[0].content;
  CHECK(prompt.find("Domain information: a logistics domain") != std::string::npos);
  CHECK(prompt.find("- p1 - package\n") != std::string::npos);
  CHECK(prompt.find("(airport ?l - location): true if the location ?l is an airport") != std::string::npos);
  CHECK(prompt.find("Instruction: package p1 to the airport of city c2") != std::string::npos);
  CHECK(store.exists("goal-lg-1-2"));
}

TEST_CASE("classical pipeline") {
  Setup s;
  llm::ScriptedTransport t({kGoalReply});
  Gateway g{t};
  auto r = orchestrator::classical_pipeline(s.instr, s.domain, s.reg, g);
  REQUIRE(r.plan.outcome == planner::Outcome::Solved);
  REQUIRE(r.validation);
  CHECK(r.validation->valid);
  CHECK(r.record.outcome == "success");
  CHECK(r.record.mode == "classical");
  CHECK(r.record.plan == r.plan.plan);
  CHECK(r.record.detail["goal"][0] == "(package-at p1 l4)");
  CHECK(orchestrator::to_json(orchestrator::run_from_json(orchestrator::to_json(r.record))) ==
        orchestrator::to_json(r.record));

  SUBCASE("already satisfied goal") {
    llm::ScriptedTransport t2({"(and (package-at p1 l1))"});
    Gateway g2{t2};
    auto r2 = orchestrator::classical_pipeline(s.instr, s.domain, s.reg, g2);
    CHECK(r2.plan.outcome == planner::Outcome::Solved);
    CHECK(r2.plan.plan.steps.empty());
  }
  SUBCASE("rejected goal never reaches the planner") {
    llm::ScriptedTransport t2({"(and (package-at p1 nowhere))"});
    Gateway g2{t2};
    try {
      orchestrator::classical_pipeline(s.instr, s.domain, s.reg, g2);
      FAIL("accepted");
    } catch (const orchestrator::UntranslatableGoal& e) {
      auto rec = orchestrator::invalid_translation_record(s.instr, "classical", e);
      CHECK(rec.outcome == "invalid-translation");
      CHECK(rec.detail["violation"].get<std::string>().find("nowhere") != std::string::npos);
    }
  }
}

TEST_CASE("validation feedback") {
  Setup s;
  auto problem = with_goal(s.instr.context, {{true, {"package-at", {"p1", "l4"}}}});
  CHECK(orchestrator::translate_validation_feedback(engine::validate_plan(s.domain, problem, pddl::parse_plan(kGoodPlan)),
                                                    s.reg) == "");

  auto report = engine::validate_plan(s.domain, problem, pddl::parse_plan(kBadPlan));
  CHECK(orchestrator::translate_validation_feedback(report, s.reg) ==
        "The action at step 2 is not executable due to unmet precondition(s). Here are the unsatisfied "
        "precondition(s):\n- the truck t1 is located at the location l2");

  // One failure of each kind, frozen.
  auto bw = testsupport::domain("blocksworld");
  auto breg = builder::PredicateRegistry::from_domain(bw);
  auto task = testsupport::blocks_task({{"a", "b"}, {"c"}}, {{"a", "c"}});
  std::string all;
  for (const char* plan : {"(unstack b a)\n(stack b b)\n", "(pick-up c)\n(pick-up a)\n", "(unstack b a)\n(put-down b)\n",
                           "(pick-up b)\n", "(stack a q)\n", "(unstack b a)\n(stack b c)\n(unstack b c)\n(stack b c)\n"}) {
    all += orchestrator::translate_validation_feedback(engine::validate_plan(bw, task, pddl::parse_plan(plan)), breg);
    all += "\n---\n";
  }
  all += orchestrator::translate_validation_feedback(
      engine::validate_plan(s.domain, problem, pddl::parse_plan("(drive-truck t1 l1 l1 c1)\n")), s.reg);
  all += "\n---\n";
  all += orchestrator::translate_validation_feedback(
      engine::validate_plan(s.domain, problem, pddl::parse_plan("(load-truck p1 t1 l1)\n")), s.reg);
  all += "\n";
  CHECK(all == testsupport::golden("validation_feedback.txt"));
}

TEST_CASE("translate_actions") {
  Setup s;
  const auto& objects = s.instr.context.objects;

  SUBCASE("canonical text needs no gateway") {
    llm::ScriptedTransport t;
    Gateway g{t};
    auto r = orchestrator::translate_actions(kGoodPlan, s.domain, objects, &g);
    REQUIRE(r.plan);
    CHECK(*r.plan == pddl::parse_plan(kGoodPlan));
    CHECK(r.gateway_calls == 0);
  }
  SUBCASE("normalized forms") {
    auto r = orchestrator::translate_actions(
        "Plan:\n```\n1. (Load-Truck P1 T1 L1)\n2) drive truck the t1 l1 l2 c1\nStep 3: unload_truck p1, t1, l2\n```\n",
        s.domain, objects);
    REQUIRE(r.plan);
    CHECK(r.plan->steps == std::vector<pddl::PlanStep>{{"load-truck", {"p1", "t1", "l1"}},
                                                       {"drive-truck", {"t1", "l1", "l2", "c1"}},
                                                       {"unload-truck", {"p1", "t1", "l2"}}});
  }
  SUBCASE("free text goes through the translation prompt") {
    llm::ScriptedTransport t({"(drive-truck t1 l1 l2 c1)"});
    Gateway g{t};
    auto r = orchestrator::translate_actions("drive the truck t1 from l1 to l2 in c1", s.domain, objects, &g);
    REQUIRE(r.plan);
    CHECK(r.plan->steps == std::vector<pddl::PlanStep>{{"drive-truck", {"t1", "l1", "l2", "c1"}}});
    CHECK(r.gateway_calls == 1);
  }
  SUBCASE("missing argument names the step") {
    llm::ScriptedTransport t;
    Gateway g{t};
    auto r = orchestrator::translate_actions("(load-truck p1 t1 l1)\n(drive-truck t1 l1 l2)\n", s.domain, objects, &g);
    CHECK_FALSE(r.plan);
    CHECK(r.error ==
          "There is an invalid output at step 2. Please strictly follow the output format provided in the example "
          "output of each action. Your revised plan:");
    CHECK(r.gateway_calls == 0);
  }
  SUBCASE("untranslatable step") {
    llm::ScriptedTransport t({"None"});
    Gateway g{t};
    auto r = orchestrator::translate_actions("(load-truck p1 t1 l1)\nteleport the package\n", s.domain, objects, &g);
    CHECK_FALSE(r.plan);
    CHECK(r.error.find("invalid output at step 2.") != std::string::npos);
    CHECK(r.gateway_calls == 1);
    CHECK_FALSE(orchestrator::translate_actions("teleport the package\n", s.domain, objects).plan);
  }
}

TEST_CASE("llm plan loop") {
  Setup s;
  SUBCASE("wrong once, then correct") {
    auto dir = testsupport::scratch("orch_loop");
    llm::ConversationStore store(dir);
    llm::ScriptedTransport t({kGoalReply, kBadPlan, kGoodPlan});
    Gateway g{t, {}, &store};
    auto o = orchestrator::llm_plan_loop(s.instr, s.domain, s.reg, g);
    CHECK(o.status == LoopStatus::Success);
    CHECK(o.rounds == 2);
    CHECK(o.feedback_messages == 1);
    CHECK_FALSE(o.duplicate_plan);
    CHECK(o.plan == pddl::parse_plan(kGoodPlan));
    auto conv = store.load(o.transcript);
    REQUIRE(conv.messages.size() == 4);
    CHECK(conv.messages[0].content.find("Action: drive-truck") != std::string::npos);
    CHECK(conv.messages[0].content.find("- the package p1 is located at the location l1\n") != std::string::npos);
    CHECK(conv.messages[2].content.find("at step 2 is not executable") != std::string::npos);
  }
  SUBCASE("same invalid plan every time") {
    llm::ScriptedTransport t({kGoalReply});
    for (int i = 0; i < 20; ++i) t.push(kBadPlan);
    Gateway g{t};
    auto o = orchestrator::llm_plan_loop(s.instr, s.domain, s.reg, g);
    CHECK(o.status == LoopStatus::Exhausted);
    CHECK(o.rounds == 8);
    CHECK(o.feedback_messages == 7);
    CHECK(o.duplicate_plan);
    CHECK(t.remaining() == 12);
  }
  SUBCASE("correct on the first try") {
    llm::ScriptedTransport t({kGoalReply, kGoodPlan});
    Gateway g{t};
    auto o = orchestrator::llm_plan_loop(s.instr, s.domain, s.reg, g);
    CHECK(o.status == LoopStatus::Success);
    CHECK(o.rounds == 1);
    CHECK(o.feedback_messages == 0);
  }
  SUBCASE("unreadable output is fed back") {
    llm::ScriptedTransport t({kGoalReply, "(load-truck p1)\n", kGoodPlan});
    Gateway g{t};
    auto o = orchestrator::llm_plan_loop(s.instr, s.domain, s.reg, g);
    CHECK(o.status == LoopStatus::Success);
    REQUIRE(o.feedback.size() == 1);
    CHECK(o.feedback[0].find("invalid output at step 1") != std::string::npos);
  }
  SUBCASE("bad goal translation") {
    llm::ScriptedTransport t({"(and (delivered p1))", kGoodPlan});
    Gateway g{t};
    auto o = orchestrator::llm_plan_loop(s.instr, s.domain, s.reg, g);
    CHECK(o.status == LoopStatus::InvalidTranslation);
    CHECK(o.rounds == 0);
    CHECK(t.remaining() == 1);
  }
}

TEST_CASE("loop properties over random scripts") {
  // Soundness and cap enforcement for arbitrary mixes of good, bad and
  // unreadable replies and caps.
  Setup s;
  auto problem = with_goal(s.instr.context, {{true, {"package-at", {"p1", "l4"}}}});
  std::mt19937 rng(20240517);
  const char* pool[] = {kGoodPlan, kBadPlan, "(fly-airplane a1 l2)\n", "(load-truck p1 t1 l1)\n"};
  for (int trial = 0; trial < 200; ++trial) {
    int cap = 1 + static_cast<int>(rng() % 10);
    llm::ScriptedTransport t({kGoalReply});
    for (int i = 0; i < cap; ++i) t.push(pool[rng() % 10 < 2 ? 0 : 1 + rng() % 3]);
    Gateway g{t};
    auto o = orchestrator::llm_plan_loop(s.instr, s.domain, s.reg, g, {cap, {}});
    CAPTURE(trial);
    CHECK(o.rounds >= 1);
    CHECK(o.rounds <= cap);
    CHECK(o.feedback_messages == o.rounds - 1);
    if (o.status == LoopStatus::Exhausted) CHECK(o.rounds == cap);
    if (o.status == LoopStatus::Success) CHECK(engine::validate_plan(s.domain, problem, o.plan).valid);
  }
}

TEST_CASE("ordering post-check") {
  auto plan = pddl::parse_plan("(heat-with-pan potato pan stove)\n(mash potato masher)\n");
  using C = orchestrator::OrderingConstraint;
  CHECK(orchestrator::check_orderings(plan, {C{{"heat", "potato"}, {"mash", "potato"}}}).empty());
  CHECK(orchestrator::check_orderings(plan, {C{{"mash", "potato"}, {"heat", "potato"}}}).size() == 1);
  CHECK(orchestrator::check_orderings(plan, {C{{"slice", ""}, {"mash", ""}}}).size() == 1);
}
