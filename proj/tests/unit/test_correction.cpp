#include <set>

#include "doctest.h"
#include "llmpddl/builder/authoring.hpp"
#include "llmpddl/builder/construction.hpp"
#include "llmpddl/correction/correction.hpp"
#include "llmpddl/pddl/action_block.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "support.hpp"

using namespace llmpddl;
using correction::Source;

namespace {

// A session whose actions each come from a two-message construction
// dialogue that produced exactly the given model.
struct Fixture {
  pddl::DomainModel domain;
  std::map<std::string, llm::Conversation> conversations;
};

Fixture dialogues_for(pddl::DomainModel d) {
  Fixture f;
  std::set<std::string> known;
  for (auto& a : d.actions) {
    std::string id = builder::conversation_id(2, a.name);
    llm::Conversation c{id, {"construction"}, {}};
    c.add(llm::Role::User, "Construct " + a.name + ".");
    c.add(llm::Role::Assistant, builder::author_reply(a, d, known));
    a.provenance = id + ":1";
    f.conversations[id] = c;
  }
  f.domain = std::move(d);
  return f;
}

std::string reply_for(const pddl::ActionModel& m) { return pddl::print_action_block(m, {}); }

}  // namespace

TEST_CASE("render_model_nl") {
  auto bw = testsupport::domain("blocksworld");
  auto reg = builder::PredicateRegistry::from_domain(bw);
  auto text = correction::render_model_nl(*bw.find_action("put-down"), reg);
  CHECK(text.find("The robot arm must be holding the block ?x.") != std::string::npos);
  CHECK(text.find("The robot arm will no longer be holding the block ?x.") != std::string::npos);

  pddl::ActionModel empty{"wait", {{"?x", "block"}}, {}, {}, {}, {}, ""};
  auto e = correction::render_model_nl(empty, reg);
  CHECK(e.find("This action has no preconditions.") != std::string::npos);
  CHECK(e.find("This action has no effects.") != std::string::npos);
  CHECK(e.find("- ?x is a block.") != std::string::npos);

  pddl::ActionModel unknown{"poke", {{"?x", "block"}}, {{true, {"mystery", {"?x"}}}}, {}, {}, {}, ""};
  CHECK_THROWS_AS(correction::render_model_nl(unknown, reg), correction::MissingDescription);

  auto lg = testsupport::domain("logistics");
  auto lreg = builder::PredicateRegistry::from_domain(lg);
  std::string all;
  for (const auto& a : lg.actions) all += correction::render_model_nl(a, lreg) + "\n";
  CHECK(all == testsupport::golden("nl_logistics.txt"));
}

TEST_CASE("diff_lines") {
  auto d = correction::diff_lines("a\nb\nc\n", "a\nc\nd\n");
  CHECK(d.removed == std::vector<std::string>{"b"});
  CHECK(d.added == std::vector<std::string>{"d"});
  CHECK(correction::diff_lines("x\n", "x\n").empty());
}

TEST_CASE("object-on misuse is fixed in one auditor round") {
  auto d = testsupport::domain("household");
  auto correct = *d.find_action("heat-with-pan");
  auto& broken = *d.find_action("heat-with-pan");
  broken.params.push_back({"?x", "householdObject"});
  for (auto& l : broken.precondition) {
    if (l.atom.predicate == "object-on") l.atom.args[1] = "?x";
  }
  auto fx = dialogues_for(d);
  llm::ScriptedTransport t({reply_for(correct)});
  correction::CorrectionSession s(fx.domain, builder::PredicateRegistry::from_domain(fx.domain), fx.conversations, t);

  REQUIRE_FALSE(s.audit("heat-with-pan").clean());
  auto request = s.auditor_feedback("heat-with-pan");
  CHECK(request.text.find("the second parameter of 'object-on' should be a furnitureAppliance, but a householdObject "
                          "was given") != std::string::npos);
  auto rev = s.apply_feedback("heat-with-pan", request);
  CHECK(rev.audit.clean());
  CHECK(s.audit("heat-with-pan").clean());
  CHECK_FALSE(rev.introduced_new_errors);
  CHECK(s.events().back().resolved);
  CHECK(s.domain().find_action("heat-with-pan")->precondition == correct.precondition);

  // Dialogue integrity: the construction messages are untouched and the
  // provenance points at the new reply.
  const auto& conv = s.conversations().at("construct-p2-heat-with-pan");
  REQUIRE(conv.messages.size() == 4);
  CHECK(conv.messages[0] == fx.conversations.at("construct-p2-heat-with-pan").messages[0]);
  CHECK(conv.messages[1] == fx.conversations.at("construct-p2-heat-with-pan").messages[1]);
  CHECK(conv.messages[2].content == request.text);
  CHECK(s.domain().find_action("heat-with-pan")->provenance == "construct-p2-heat-with-pan:3");
}

TEST_CASE("human feedback adds the missing delete effect") {
  auto d = testsupport::domain("household");
  auto correct = *d.find_action("mash");
  auto& broken = *d.find_action("mash");
  const pddl::Atom pickupable{"pickupable", {"?o"}};
  std::erase(broken.del_effects, pickupable);
  auto fx = dialogues_for(d);
  llm::ScriptedTransport t({reply_for(correct)});
  correction::CorrectionSession s(fx.domain, builder::PredicateRegistry::from_domain(fx.domain), fx.conversations, t);

  auto rev = s.apply_feedback(
      "mash", {Source::Human, "there is a missing effect: the item is no longer pickupable after being mashed", "", true});
  CHECK(rev.diff.removed.empty());
  CHECK(rev.diff.added == std::vector<std::string>{"      (not (pickupable ?o))"});
  CHECK(std::find(rev.after.del_effects.begin(), rev.after.del_effects.end(), pickupable) != rev.after.del_effects.end());
  auto json = correction::to_json(rev);
  CHECK(json["diff"]["added"][0] == "      (not (pickupable ?o))");
}

TEST_CASE("identical reply yields an empty diff") {
  auto fx = dialogues_for(testsupport::domain("logistics"));
  llm::ScriptedTransport t({reply_for(*fx.domain.find_action("fly-airplane"))});
  correction::CorrectionSession s(fx.domain, builder::PredicateRegistry::from_domain(fx.domain), fx.conversations, t);
  auto rev = s.apply_feedback("fly-airplane", {Source::Human, "looks fine, please confirm", "", true});
  CHECK(rev.diff.empty());
}

TEST_CASE("a reply that worsens the audit is kept and flagged") {
  auto fx = dialogues_for(testsupport::domain("logistics"));
  auto worse = *fx.domain.find_action("drive-truck");
  worse.del_effects.push_back(worse.add_effects.front());
  llm::ScriptedTransport t({reply_for(worse)});
  correction::CorrectionSession s(fx.domain, builder::PredicateRegistry::from_domain(fx.domain), fx.conversations, t);
  auto rev = s.apply_feedback("drive-truck", {Source::Human, "the truck should stay in the city", "", true});
  CHECK(rev.introduced_new_errors);
  CHECK(s.events().back().introduced_new_errors);
  CHECK(s.domain().find_action("drive-truck")->del_effects == worse.del_effects);
}

TEST_CASE("unknown action, unreadable replies") {
  auto fx = dialogues_for(testsupport::domain("logistics"));
  llm::ScriptedTransport t({"?", "??", "???", "????"});
  correction::CorrectionSession s(fx.domain, builder::PredicateRegistry::from_domain(fx.domain), fx.conversations, t);
  CHECK_THROWS_AS(s.apply_feedback("teleport", {Source::Human, "x", "", true}), std::out_of_range);
  CHECK_THROWS_AS(s.apply_feedback("load-truck", {Source::Human, "x", "", true}), builder::ParseFailureAfterRetries);
  CHECK(s.events().empty());
}

TEST_CASE("feedback ledger") {
  CHECK(correction::to_json(correction::feedback_ledger({})) ==
        nlohmann::json{{"per_action", nlohmann::json::object()},
                       {"total_human_messages", 0},
                       {"errors_resolved", 0},
                       {"extra_rounds", 0}});

  using E = correction::FeedbackEvent;
  std::vector<E> events = {
      {0, Source::Human, "mash", "missing effect", "mash-pickupable", false, 0, false},
      {1, Source::Human, "mash", "still missing", "mash-pickupable", true, 1, false},
      {2, Source::Human, "slice", "cutting board", "slice-board", true, 2, false},
  };
  auto l = correction::feedback_ledger(events);
  CHECK(l.extra_rounds == 1);
  CHECK(l.total_human_messages == 3);
  CHECK(l.errors_resolved == 2);

  events.push_back({3, Source::Auditor, "heat-with-pan", "object-on", "audit|x", true, 3, false});
  events.push_back({4, Source::PlanValidation, "slice", "step 2", "slice-2", true, 4, false});
  l = correction::feedback_ledger(events);
  CHECK(l.total_human_messages == 3);
  CHECK(l.per_action["heat-with-pan"].auditor == 1);
  CHECK(l.per_action["slice"].plan_validation == 1);
  int sum = 0;
  for (const auto& [a, c] : l.per_action) sum += c.human;
  CHECK(sum == l.total_human_messages);
  for (const auto& e : events) CHECK(correction::to_json(correction::event_from_json(correction::to_json(e))) == correction::to_json(e));
}

TEST_CASE("audit convergence over the seeded corpus in one round") {
  // Every seeded syntax error in an action model is repaired by a single
  // auditor round when the reply restores the original.
  for (const std::string name : {"logistics", "tyreworld", "household"}) {
    auto d = testsupport::domain(name);
    for (std::size_t k = 0; k < d.actions.size(); k += 3) {
      auto broken = d;
      auto& a = broken.actions[k];
      const auto original = a;
      if (!a.add_effects.empty()) {
        auto atom = a.add_effects.front();
        a.del_effects.push_back(atom);
      } else {
        a.params.front().type = "gizmo";
      }
      auto fx = dialogues_for(broken);
      llm::ScriptedTransport t({reply_for(original)});
      correction::CorrectionSession s(fx.domain, builder::PredicateRegistry::from_domain(d), fx.conversations, t);
      CAPTURE(a.name);
      REQUIRE_FALSE(s.audit(a.name).clean());
      auto rev = s.apply_feedback(a.name, s.auditor_feedback(a.name));
      CHECK(rev.audit.clean());
      CHECK(correction::feedback_ledger(s.events()).errors_resolved == 1);
    }
  }
}
