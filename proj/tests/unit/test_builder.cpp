#include <set>

#include "doctest.h"
#include "llmpddl/builder/authoring.hpp"
#include "llmpddl/builder/construction.hpp"
#include "llmpddl/engine/state.hpp"
#include "llmpddl/pddl/action_block.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "llmpddl/planner/planner.hpp"
#include "support.hpp"

using namespace llmpddl;
using builder::PredicateRegistry;

namespace {

workspace::ProjectConfig config_for(const pddl::DomainModel& d, const std::vector<std::string>& actions = {}) {
  workspace::ProjectConfig c;
  c.name = d.name;
  c.domain_description = "Test domain " + d.name + ".";
  for (const auto& t : d.types.types()) c.types.emplace_back(t, *d.types.parent(t));
  for (const auto& a : d.actions) {
    if (actions.empty() || std::find(actions.begin(), actions.end(), a.name) != actions.end()) {
      c.actions.push_back({a.name, "This action lets the agent " + a.name + ".", ""});
    }
  }
  return c;
}

pddl::PredicateDef pred(const std::string& name, std::vector<pddl::TypedName> params, const std::string& desc) {
  return {name, std::move(params), desc};
}

// Every predicate a model mentions is in the registry with a description.
void check_coverage(const builder::BuildResult& r) {
  for (const auto& a : r.draft.actions) {
    auto check = [&](const pddl::Atom& atom) {
      const auto* def = r.registry.find(atom.predicate);
      CAPTURE(atom.predicate);
      REQUIRE(def);
      CHECK_FALSE(def->description.empty());
    };
    for (const auto& l : a.precondition) check(l.atom);
    for (const auto& x : a.add_effects) check(x);
    for (const auto& x : a.del_effects) check(x);
  }
}

}  // namespace

TEST_CASE("merge_predicates") {
  auto d = testsupport::domain("household");
  PredicateRegistry reg;
  auto r1 = builder::merge_predicates(reg, {pred("robot-at", {{"?r", "robot"}, {"?f", "furnitureAppliance"}}, "at"),
                                            pred("pickupable", {{"?o", "householdObject"}}, "graspable")},
                                      "go-to", d.types);
  CHECK(r1.collisions.empty());
  REQUIRE(r1.registry.size() == 2);
  CHECK(r1.registry.entries()[0].name == "robot-at");
  CHECK(r1.registry.entries()[1].name == "pickupable");
  CHECK(r1.registry.origins("robot-at") == std::vector<std::string>{"go-to"});

  auto r2 = builder::merge_predicates(r1.registry,
                                      {pred("pickupable", {{"?o", "householdObject"}}, "can be lifted"),
                                       pred("smallreceptacle", {{"?z", "householdObject"}}, "a receptacle"),
                                       pred("washed", {{"?o", "householdObject"}}, "clean")},
                                      "wash", d.types);
  REQUIRE(r2.collisions.size() == 2);
  CHECK(r2.collisions[0].category == audit::Category::TypeNameClash);
  CHECK(r2.collisions[1].category == audit::Category::PredicateNameClash);
  CHECK(r2.collisions[1].message.find("can be lifted") != std::string::npos);
  CHECK(r2.collisions[1].message.find("graspable") != std::string::npos);
  REQUIRE(r2.registry.size() == 3);
  CHECK(r2.registry.entries()[1].description == "graspable");
  CHECK(r2.registry.entries()[2].name == "washed");
}

TEST_CASE("registry text round trip and corruption") {
  auto reg = PredicateRegistry::from_domain(testsupport::domain("household"));
  auto back = PredicateRegistry::from_text(reg.to_text());
  CHECK(back == reg);
  CHECK(PredicateRegistry().render_for_prompt() == "No predicate has been defined yet");
  CHECK(reg.render_for_prompt().rfind("1. (robot-at ?r - robot ?f - furnitureAppliance): true if", 0) == 0);
  CHECK_THROWS_AS(PredicateRegistry::from_text("(a ?x - t) ; x\n(a ?y - t) ; y\n"), builder::CorruptRegistry);
  CHECK_THROWS_AS(PredicateRegistry::from_text("(a ?x - t"), builder::CorruptRegistry);
  CHECK_THROWS_AS(PredicateRegistry::from_text("oops"), builder::CorruptRegistry);
}

TEST_CASE("action block printer round-trips through the reply parser") {
  for (const std::string name : {"blocksworld", "logistics", "tyreworld", "household"}) {
    auto d = testsupport::domain(name);
    std::set<std::string> known;
    for (const auto& a : d.actions) {
      auto intro = builder::introduced_predicates(a, d, known);
      auto block = pddl::parse_action_block(pddl::print_action_block(a, intro), {true});
      CHECK(block.to_model(a.name) == a);
      CHECK(block.new_predicates == intro);
    }
  }
}

TEST_CASE("construct_action") {
  auto d = testsupport::domain("logistics");
  auto config = config_for(d);
  const auto& load = *d.find_action("load-truck");

  SUBCASE("well-formed reply with one new predicate") {
    PredicateRegistry reg;
    std::set<std::string> known;
    for (const auto& p : d.predicates) {
      if (p.name != "package-in-truck") {
        known.insert(p.name);
        reg.append(p, "");
      }
    }
    llm::ScriptedTransport t({builder::author_reply(load, d, known)});
    builder::ConstructionSession s(config, t);
    auto out = s.construct_action(*config.find_action("load-truck"), reg);
    CHECK(out.model.precondition == load.precondition);
    CHECK(out.model.add_effects == load.add_effects);
    CHECK(out.model.del_effects == load.del_effects);
    REQUIRE(out.new_predicates.size() == 1);
    CHECK(out.new_predicates[0].name == "package-in-truck");
    CHECK(out.syntax_rounds == 0);
    CHECK(out.remaining.clean());
    CHECK(out.model.provenance == "construct-p1-load-truck:1");
    const auto& conv = s.conversations().at("construct-p1-load-truck");
    REQUIRE(conv.messages.size() == 2);
    CHECK(conv.messages[0].content.find("Action: This action lets the agent load-truck.") != std::string::npos);
  }

  SUBCASE("reuse only") {
    auto reg = PredicateRegistry::from_domain(d);
    std::set<std::string> known;
    for (const auto& p : d.predicates) known.insert(p.name);
    llm::ScriptedTransport t({builder::author_reply(load, d, known)});
    builder::ConstructionSession s(config, t);
    auto out = s.construct_action(*config.find_action("load-truck"), reg);
    CHECK(out.new_predicates.empty());
    CHECK(s.conversations().at("construct-p1-load-truck").messages[0].content.find(
              "1. (package-at ?p - package ?l - location): ") != std::string::npos);
  }

  SUBCASE("forall gets one feedback round") {
    auto reg = PredicateRegistry::from_domain(d);
    std::string bad = R"(Parameters:
1. ?p - package: the package
2. ?t - truck: the truck
3. ?l - location: where both are

Preconditions:
```
(and
    (forall (?x - truck) (truck-at ?x ?l))
    (package-at ?p ?l)
)
```

Effects:
```
(and
    (package-in-truck ?p ?t)
    (not (package-at ?p ?l))
)
```

New Predicates:
None)";
    std::set<std::string> known;
    for (const auto& p : d.predicates) known.insert(p.name);
    llm::ScriptedTransport t({bad, builder::author_reply(load, d, known)});
    builder::ConstructionSession s(config, t);
    auto out = s.construct_action(*config.find_action("load-truck"), reg);
    CHECK(out.syntax_rounds == 1);
    CHECK(out.remaining.clean());
    CHECK(out.model.precondition == load.precondition);
    CHECK(out.model.provenance == "construct-p1-load-truck:3");
    const auto& conv = s.conversations().at("construct-p1-load-truck");
    REQUIRE(conv.messages.size() == 4);
    CHECK(conv.messages[2].content.rfind("The precondition or effect contain the keyword 'forall' that is not supported",
                                         0) == 0);
  }

  SUBCASE("format error then a readable reply") {
    auto reg = PredicateRegistry::from_domain(d);
    std::set<std::string> known;
    for (const auto& p : d.predicates) known.insert(p.name);
    llm::ScriptedTransport t({"Sure! Here it is: (load ?p)", builder::author_reply(load, d, known)});
    builder::ConstructionSession s(config, t);
    auto out = s.construct_action(*config.find_action("load-truck"), reg);
    CHECK(out.syntax_rounds == 1);
    const auto& conv = s.conversations().at("construct-p1-load-truck");
    CHECK(conv.messages[2].content.rfind("There is a format error in your output: the reply has no 'Preconditions:' section",
                                         0) == 0);
  }

  SUBCASE("never readable") {
    auto reg = PredicateRegistry::from_domain(d);
    llm::ScriptedTransport t({"no", "still no", "nope", "never"});
    builder::ConstructionSession s(config, t);
    CHECK_THROWS_AS(s.construct_action(*config.find_action("load-truck"), reg), builder::ParseFailureAfterRetries);
    CHECK(t.remaining() == 0);
    CHECK(s.conversations().at("construct-p1-load-truck").messages.size() == 8);
  }

  SUBCASE("stubborn clash is returned after three rounds") {
    auto reg = PredicateRegistry::from_domain(d);
    auto reply = pddl::print_action_block(load, {pred("truck", {{"?t", "truck"}}, "true if ?t is a truck")});
    llm::ScriptedTransport t({reply, reply, reply, reply, "unused"});
    builder::ConstructionSession s(config, t);
    auto out = s.construct_action(*config.find_action("load-truck"), reg);
    CHECK(out.syntax_rounds == 3);
    CHECK(t.remaining() == 1);
    REQUIRE(out.remaining.findings.size() == 1);
    CHECK(out.remaining.findings[0].category == audit::Category::TypeNameClash);
  }
}

TEST_CASE("build_domain on a single action still runs pass 2") {
  auto d = testsupport::domain("blocksworld");
  auto config = config_for(d, {"pick-up"});
  std::set<std::string> known;
  const auto& a = *d.find_action("pick-up");
  auto first = builder::author_reply(a, d, known);
  auto second = builder::author_reply(a, d, known);
  llm::ScriptedTransport t({first, second});
  builder::ConstructionSession s(config, t);
  auto r = s.build_domain();
  REQUIRE(r.history.size() == 2);
  CHECK(r.history[0].step.pass == 1);
  CHECK(r.history[1].step.pass == 2);
  CHECK(r.history[0].registry == r.history[1].registry);
  CHECK(r.history[1].step.new_predicates.empty());
  CHECK(r.draft.actions.size() == 1);
  CHECK(r.draft.actions[0].provenance == "construct-p2-pick-up:1");
  check_coverage(r);
}

TEST_CASE("household subset: pass 2 adds the openable precondition to pick-up") {
  auto d = testsupport::domain("household");
  auto config = config_for(d, {"go-to", "pick-up", "open-furniture"});
  auto naive_pickup = *d.find_action("pick-up");
  const pddl::Literal closed{false, {"furniture-closed", {"?f"}}};
  std::erase(naive_pickup.precondition, closed);
  REQUIRE(naive_pickup.precondition.size() + 1 == d.find_action("pick-up")->precondition.size());

  std::set<std::string> known;
  std::vector<std::string> replies = {
      builder::author_reply(*d.find_action("go-to"), d, known),
      builder::author_reply(naive_pickup, d, known),
      builder::author_reply(*d.find_action("open-furniture"), d, known),
  };
  for (const char* name : {"go-to", "pick-up", "open-furniture"}) {
    replies.push_back(builder::author_reply(*d.find_action(name), d, known));
  }
  llm::ScriptedTransport t(replies);
  builder::ConstructionSession s(config, t);
  auto r = s.build_domain();

  REQUIRE(r.history.size() == 6);
  const auto& pass1_pickup = r.history[1].step;
  CHECK(pass1_pickup.model.precondition == naive_pickup.precondition);
  // The pass-1 prompt for pick-up could not mention furniture-closed yet.
  CHECK(s.conversations().at("construct-p1-pick-up").messages[0].content.find("furniture-closed") == std::string::npos);
  CHECK(s.conversations().at("construct-p2-pick-up").messages[0].content.find("(furniture-closed ?f - furnitureAppliance)") !=
        std::string::npos);
  CHECK(r.registry.origins("furniture-closed").front() == "open-furniture");
  const auto& final_pickup = *r.draft.find_action("pick-up");
  CHECK(std::find(final_pickup.precondition.begin(), final_pickup.precondition.end(), closed) !=
        final_pickup.precondition.end());
  check_coverage(r);

  // Registry only grows between snapshots.
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const auto& before = r.history[i - 1].registry.entries();
    const auto& after = r.history[i].registry.entries();
    REQUIRE(after.size() >= before.size());
    CHECK(std::equal(before.begin(), before.end(), after.begin()));
  }
}

TEST_CASE("scripted logistics build solves a generated task and replays byte-identically") {
  auto d = testsupport::domain("logistics");
  auto config = config_for(d);
  auto script = [&] {
    std::set<std::string> known;
    std::vector<std::string> replies;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& a : d.actions) replies.push_back(builder::author_reply(a, d, known));
    }
    return replies;
  };
  llm::ScriptedTransport t1(script()), t2(script());
  auto r1 = builder::ConstructionSession(config, t1).build_domain();
  auto r2 = builder::ConstructionSession(config, t2).build_domain();
  auto text = pddl::print_domain(r1.draft);
  CHECK(text == pddl::print_domain(r2.draft));
  auto reparsed = pddl::parse_domain(text);
  CHECK(reparsed == r1.draft);

  auto problem = pddl::parse_problem(R"((define (problem p) (:domain logistics)
    (:objects p1 - package t1 t2 - truck a1 - plane l1 l2 a1l a2l - location c1 c2 - city)
    (:init (package-at p1 l1) (truck-at t1 l1) (truck-at t2 a2l) (plane-at a1 a1l)
           (location-in-city l1 c1) (location-in-city a1l c1) (location-in-city l2 c2) (location-in-city a2l c2)
           (airport a1l) (airport a2l))
    (:goal (and (package-at p1 l2)))))",
                                     reparsed);
  auto result = planner::solve(reparsed, problem);
  REQUIRE(result.outcome == planner::Outcome::Solved);
  CHECK(engine::validate_plan(reparsed, problem, result.plan).valid);
}
