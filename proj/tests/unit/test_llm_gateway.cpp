#include <random>

#include "doctest.h"
#include "llmpddl/llm/conversation.hpp"
#include "llmpddl/llm/template.hpp"
#include "llmpddl/llm/transport.hpp"
#include "llmpddl/resources.hpp"
#include "support.hpp"

using namespace llmpddl::llm;

TEST_CASE("render: zero slots, unbound and unknown slots") {
  PromptTemplate plain("plain", "no slots here { not one }");
  CHECK(plain.required_slots().empty());
  CHECK(plain.render({}) == "no slots here { not one }");

  PromptTemplate t("t", "Hello {{name}}, {{name}} again; {{other}}.");
  CHECK(t.required_slots() == std::vector<std::string>{"name", "other"});
  CHECK(t.render({{"name", "{{other}}"}, {"other", "x"}}) == "Hello {{other}}, {{other}} again; x.");
  CHECK_THROWS_AS(t.render({{"name", "a"}}), UnboundSlot);
  CHECK_THROWS_AS(t.render({{"name", "a"}, {"other", "b"}, {"typo", "c"}}), UnknownSlot);
  CHECK_THROWS_AS(PromptTemplate("bad", "{{Bad Slot}}"), UnknownSlot);
  CHECK_THROWS_AS(PromptTemplate("bad", "{{open"), UnknownSlot);
}

TEST_CASE("construction template binds the five prompt parts") {
  TemplateSet set;
  const auto& t = set.get("construct_action");
  CHECK(t.required_slots() == std::vector<std::string>{"instructions", "examples", "domain_description",
                                                        "action_description", "extra_info", "predicate_list"});
  auto examples = set.get("blocksworld_examples").body();
  CHECK(examples.find("Example 1") != std::string::npos);
  CHECK(examples.find("Example 2") != std::string::npos);
  auto text = set.render("construct_action", {{"instructions", "INSTR"},
                                              {"examples", examples},
                                              {"domain_description", "DOMAIN"},
                                              {"action_description", "ACTION"},
                                              {"extra_info", ""},
                                              {"predicate_list", "No predicate has been defined yet"}});
  CHECK(text.find("INSTR") < text.find("Example 1"));
  CHECK(text.find("Example 2") < text.find("DOMAIN"));
  CHECK(text.find("DOMAIN") < text.find("ACTION"));
  CHECK(text.find("ACTION") < text.rfind("No predicate has been defined yet"));
}

TEST_CASE("goal-translation render matches the golden file") {
  TemplateSet set;
  auto text = set.render("goal_translation",
                         {{"domain_description", "Packages move between locations by truck and between cities by airplane."},
                          {"predicate_list",
                           "1. (package-at ?p - package ?l - location): true if the package ?p is located at the location ?l"},
                          {"objects", "p1 - package\nl1 - location"},
                          {"instruction", "Bring p1 to l1."}});
  CHECK(text == testsupport::read_file(std::string(LLMPDDL_GOLDEN_DIR) + "/goal_translation_logistics.txt"));
}

TEST_CASE("template overrides must keep the slot set") {
  auto dir = testsupport::scratch("templates");
  std::ofstream(dir / "goal_translation.txt") << "Short: {{domain_description}} {{predicate_list}} {{objects}} {{instruction}}";
  std::ofstream(dir / "custom_note.txt") << "note {{x}}";
  auto set = TemplateSet::load(dir);
  CHECK(set.get("goal_translation").body().rfind("Short:", 0) == 0);
  CHECK(set.render("custom_note", {{"x", "1"}}) == "note 1");
  std::ofstream(dir / "goal_translation.txt") << "Short: {{instruction}}";
  CHECK_THROWS(TemplateSet::load(dir));
}

TEST_CASE("digest is SHA-256 over length-prefixed role and content") {
  std::vector<Message> msgs = {{Role::System, "be terse.", "2020-01-01T00:00:00Z"}, {Role::User, "hello", ""}};
  CHECK(digest(msgs) == "811fd3a8d37a353a9791c91083adad98d69ef01c0218a74ea99f5477a10a1ce4");
  CHECK(digest({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  msgs[0].timestamp = "later";
  CHECK(digest(msgs) == "811fd3a8d37a353a9791c91083adad98d69ef01c0218a74ea99f5477a10a1ce4");
}

TEST_CASE("scripted transport") {
  ScriptedTransport t({"only reply"});
  Conversation c{"c1", {}, {}};
  c.add(Role::User, "hi");
  CHECK(complete(c, t).content == "only reply");
  CHECK(t.remaining() == 0);
  CHECK_THROWS_AS(complete(c, t), std::logic_error);
  c.add(Role::User, "again");
  CHECK_THROWS_AS(complete(c, t), ScriptExhausted);
}

TEST_CASE("record then replay is deterministic; mutated prompt misses") {
  auto dir = testsupport::scratch("cassettes");
  auto cassette = dir / "c.jsonl";
  ScriptedTransport script({"first answer", "second answer"});
  RecordingTransport recorder(script, cassette);
  Conversation c{"rec", {}, {}};
  c.add(Role::User, "question one");
  complete(c, recorder);
  c.add(Role::User, "question two");
  complete(c, recorder);
  CHECK(read_cassette(cassette).size() == 2);

  ReplayTransport replay({cassette});
  for (int run = 0; run < 2; ++run) {
    Conversation r{"rep", {}, {}};
    r.add(Role::User, "question one");
    CHECK(complete(r, replay).content == "first answer");
    r.add(Role::User, "question two");
    CHECK(complete(r, replay).content == "second answer");
  }
  Conversation m{"mut", {}, {}};
  m.add(Role::User, "question one!");
  CHECK_THROWS_AS(complete(m, replay), CassetteMiss);
}

TEST_CASE("conversation logs round-trip and are append-only") {
  auto dir = testsupport::scratch("conversations");
  ConversationStore store(dir);
  Conversation empty{"empty", {"pass:1"}, {}};
  store.persist(empty);
  CHECK(store.load("empty") == empty);

  std::mt19937 rng(1);
  auto random_text = [&]() {
    std::string s;
    std::size_t n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      static const std::vector<std::string> pool = {"a", "b", " ", "\n", "\t", "\"", "\\", "{", "}", "(", ")", "?",
                                                    "-", ";", "\xc3\xa9", "\xe2\x82\xac"};
      s += pool[rng() % pool.size()];
    }
    return s;
  };
  for (int i = 0; i < 100; ++i) {
    Conversation c{"conv-" + std::to_string(i), {"action:x", random_text()}, {}};
    std::size_t n = rng() % 6;
    for (std::size_t k = 0; k < n; ++k) c.add(static_cast<Role>(rng() % 3), random_text(), utc_now());
    store.persist(c);
    CHECK(store.load(c.id) == c);
  }

  Conversation grow{"grow", {}, {}};
  grow.add(Role::User, "one");
  store.persist(grow);
  auto before = testsupport::read_file(store.path("grow"));
  grow.add(Role::Assistant, "two");
  store.persist(grow);
  auto after = testsupport::read_file(store.path("grow"));
  CHECK(after.rfind(before, 0) == 0);
  CHECK(after.size() > before.size());

  Conversation forked = grow;
  forked.messages[0].content = "rewritten";
  CHECK_THROWS_AS(store.persist(forked), std::logic_error);
  CHECK(testsupport::read_file(store.path("grow")) == after);

  std::ofstream(store.path("grow"), std::ios::trunc) << after.substr(0, after.size() - 5);
  try {
    store.load("grow");
    FAIL("expected CorruptLog");
  } catch (const CorruptLog& e) {
    CHECK(e.line() == 3);
  }
}
