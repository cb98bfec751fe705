#include <thread>

#include "doctest.h"
#include "llmpddl/engine/state.hpp"
#include "llmpddl/planner/planner.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "llmpddl/workspace/generators.hpp"
#include "llmpddl/workspace/project.hpp"
#include "support.hpp"

using namespace llmpddl;
namespace ws = llmpddl::workspace;
namespace fs = std::filesystem;

namespace {

ws::ProjectConfig small_config() {
  ws::ProjectConfig c;
  c.name = "lg";
  c.domain_description = "trucks and planes";
  c.types = {{"package", "object"}, {"truck", "object"}};
  c.actions = {{"load-truck", "Load a package into a truck.", ""}};
  return c;
}

}  // namespace

TEST_CASE("init, save and load round-trip") {
  auto root = testsupport::scratch("ws_roundtrip");
  auto p = ws::init(root / "proj", small_config());
  CHECK(fs::exists(p.layout.conversations()));
  CHECK(fs::exists(p.layout.runs()));
  CHECK_THROWS_AS(ws::init(root / "proj", small_config()), ws::ConfigError);

  auto loaded = ws::load(root / "proj");
  CHECK(ws::to_json(loaded.config) == ws::to_json(p.config));
  CHECK_FALSE(loaded.current());

  auto d = testsupport::domain("logistics");
  loaded.draft = d;
  loaded.registry = builder::PredicateRegistry::from_domain(d);
  ws::save(loaded);
  auto text = testsupport::read_file(loaded.layout.draft());
  CHECK(text == pddl::print_domain(d));
  ws::save(loaded);  // idempotent
  CHECK(testsupport::read_file(loaded.layout.draft()) == text);

  auto again = ws::load(root / "proj");
  REQUIRE(again.draft);
  CHECK(*again.draft == d);
  CHECK(again.registry == loaded.registry);
  CHECK(again.current() == &*again.draft);

  // The registry must describe the same predicates as the domain file.
  again.registry = builder::PredicateRegistry::from_text("(airport ?l - location) ; true if ?l is an airport\n");
  CHECK_THROWS_AS(ws::save(again), ws::InconsistentArtifacts);
  CHECK(testsupport::read_file(again.layout.registry()) == loaded.registry.to_text());
}

TEST_CASE("corrupt artifacts and schema versions") {
  auto root = testsupport::scratch("ws_corrupt");
  auto p = ws::init(root, small_config());
  p.draft = testsupport::domain("logistics");
  p.registry = builder::PredicateRegistry::from_domain(*p.draft);
  ws::save(p);

  SUBCASE("registry") {
    std::ofstream(p.layout.registry(), std::ios::app) << "(broken ?x\n";
    try {
      ws::load(root);
      FAIL("loaded");
    } catch (const ws::CorruptArtifact& e) {
      CHECK(e.path() == p.layout.registry());
    }
  }
  SUBCASE("domain") {
    std::ofstream(p.layout.draft()) << "(define (domain";
    CHECK_THROWS_AS(ws::load(root), ws::CorruptArtifact);
  }
  SUBCASE("config") {
    std::ofstream(p.layout.config()) << "{";
    CHECK_THROWS_AS(ws::load(root), ws::CorruptArtifact);
  }
  SUBCASE("schema") {
    auto j = ws::to_json(p.config);
    j["schema_version"] = 99;
    std::ofstream(p.layout.config()) << j.dump();
    try {
      ws::load(root);
      FAIL("loaded");
    } catch (const ws::SchemaVersionMismatch& e) {
      CHECK(e.found() == 99);
    }
  }
  SUBCASE("event log") {
    ws::append_event(p, {{"index", 0}});
    std::ofstream(p.layout.events(), std::ios::app) << "{oops\n";
    CHECK_THROWS_AS(ws::load_events(p), ws::CorruptArtifact);
  }
}

TEST_CASE("logs and tasks") {
  auto root = testsupport::scratch("ws_logs");
  auto p = ws::init(root, small_config());
  CHECK(ws::load_runs(p).empty());
  ws::append_run(p, {{"task", "a"}});
  ws::append_run(p, {{"task", "b"}});
  auto runs = ws::load_runs(p);
  REQUIRE(runs.size() == 2);
  CHECK(runs[1]["task"] == "b");

  auto d = testsupport::domain("logistics");
  auto tasks = ws::logistics_tasks(3, 4);
  ws::save_tasks(p, tasks);
  auto back = ws::load_tasks(p, d);
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back[i].id == tasks[i].id);
    CHECK(back[i].instruction == tasks[i].instruction);
    CHECK(back[i].problem == tasks[i].problem);
  }
}

TEST_CASE("one writer at a time") {
  auto root = testsupport::scratch("ws_lock");
  {
    ws::WriteLock first(root);
    CHECK_THROWS_AS(ws::WriteLock{root}, ws::ProjectLocked);
    bool blocked = false;
    std::thread([&] {
      try {
        ws::WriteLock other(root);
      } catch (const ws::ProjectLocked&) {
        blocked = true;
      }
    }).join();
    CHECK(blocked);
  }
  ws::WriteLock again(root);
}

TEST_CASE("generated tasks are well-formed and solvable") {
  for (const std::string name : {"logistics", "household", "tyreworld"}) {
    auto d = testsupport::domain(name);
    auto tasks = ws::generate_tasks(name, 11, name == "tyreworld" ? 6 : 24);
    for (const auto& t : tasks) {
      CAPTURE(t.id);
      CHECK_FALSE(t.instruction.empty());
      // The printed problem parses back against the domain with the same content.
      auto parsed = pddl::parse_problem(pddl::print_problem(t.problem), d);
      CHECK(parsed == t.problem);
      auto r = planner::solve(d, t.problem);
      REQUIRE(r.outcome == planner::Outcome::Solved);
      CHECK(engine::validate_plan(d, t.problem, r.plan).valid);
    }
    // Deterministic and prefix-stable.
    auto longer = ws::generate_tasks(name, 11, static_cast<int>(tasks.size()) + 2);
    for (std::size_t i = 0; i < tasks.size(); ++i) CHECK(longer[i].problem == tasks[i].problem);
  }
  auto lg = ws::logistics_tasks(5, 40);
  for (const auto& t : lg) {
    int cities = 0, packages = 0;
    for (const auto& o : t.problem.objects) {
      cities += o.type == "city";
      packages += o.type == "package";
    }
    CHECK(cities <= 3);
    CHECK(packages >= 1);
    CHECK(packages <= 6);
  }
}
