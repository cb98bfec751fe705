#include "llmpddl/workspace/config.hpp"

#include <set>

namespace llmpddl::workspace {

using nlohmann::json;

SchemaVersionMismatch::SchemaVersionMismatch(int found, int expected)
    : std::runtime_error("project schema version " + std::to_string(found) + " is not supported (expected " +
                         std::to_string(expected) + ")"),
      found_(found) {}

pddl::TypeHierarchy ProjectConfig::type_hierarchy() const { return pddl::TypeHierarchy::from_declarations(types); }

const ActionDescription* ProjectConfig::find_action(const std::string& name) const {
  for (const auto& a : actions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

json to_json(const ProjectConfig& c) {
  json types = json::array();
  for (const auto& [t, parent] : c.types) types.push_back({{"name", t}, {"parent", parent}});
  json actions = json::array();
  for (const auto& a : c.actions) {
    json entry = {{"name", a.name}, {"description", a.text}};
    if (!a.extra_info.empty()) entry["extra_info"] = a.extra_info;
    actions.push_back(entry);
  }
  json planner = {
      {"strategy", planner::to_string(c.planner.search.strategy)},
      {"heuristic", planner::to_string(c.planner.search.heuristic)},
      {"max_expansions", c.planner.search.max_expansions},
      {"time_limit", c.planner.search.time_limit},
      {"max_operators", c.planner.grounding.max_operators},
  };
  if (!c.planner.external_command.empty()) planner["external_command"] = c.planner.external_command;
  json transport = {{"mode", c.transport.mode}, {"cassettes", c.transport.cassettes}};
  if (!c.transport.endpoint.empty()) transport["endpoint"] = c.transport.endpoint;
  if (!c.transport.model.empty()) transport["model"] = c.transport.model;
  transport["api_key_env"] = c.transport.api_key_env;
  return {
      {"schema_version", c.schema_version},
      {"name", c.name},
      {"domain_description", c.domain_description},
      {"types", types},
      {"actions", actions},
      {"transport", transport},
      {"planner", planner},
      {"planner_examples", c.planner_examples},
      {"feedback_cap", c.feedback_cap},
      {"syntax_rounds", c.syntax_rounds},
  };
}

ProjectConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("project config must be a JSON object");
  int version = j.value("schema_version", 0);
  if (version != kSchemaVersion) throw SchemaVersionMismatch(version, kSchemaVersion);
  ProjectConfig c;
  try {
    c.name = j.at("name").get<std::string>();
    c.domain_description = j.value("domain_description", "");
    for (const auto& t : j.value("types", json::array())) {
      c.types.emplace_back(t.at("name").get<std::string>(), t.value("parent", "object"));
    }
    std::set<std::string> names;
    for (const auto& a : j.value("actions", json::array())) {
      ActionDescription d{a.at("name").get<std::string>(), a.value("description", ""), a.value("extra_info", "")};
      if (!names.insert(d.name).second) throw ConfigError("action '" + d.name + "' is described twice");
      c.actions.push_back(std::move(d));
    }
    if (j.contains("transport")) {
      const auto& t = j["transport"];
      c.transport.mode = t.value("mode", "replay");
      c.transport.cassettes = t.value("cassettes", std::vector<std::string>{});
      c.transport.endpoint = t.value("endpoint", "");
      c.transport.model = t.value("model", "");
      c.transport.api_key_env = t.value("api_key_env", "OPENAI_API_KEY");
    }
    if (j.contains("planner")) {
      const auto& p = j["planner"];
      c.planner.search.strategy = planner::parse_strategy(p.value("strategy", "gbfs"));
      c.planner.search.heuristic = planner::parse_heuristic(p.value("heuristic", "hadd"));
      c.planner.search.max_expansions = p.value("max_expansions", c.planner.search.max_expansions);
      c.planner.search.time_limit = p.value("time_limit", c.planner.search.time_limit);
      c.planner.grounding.max_operators = p.value("max_operators", c.planner.grounding.max_operators);
      c.planner.external_command = p.value("external_command", "");
    }
    c.planner_examples = j.value("planner_examples", std::vector<std::string>{});
    c.feedback_cap = j.value("feedback_cap", 8);
    c.syntax_rounds = j.value("syntax_rounds", 3);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed project config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed project config: ") + e.what());
  }
  static const std::set<std::string> modes = {"scripted", "replay", "record", "live"};
  if (!modes.count(c.transport.mode)) throw ConfigError("unknown transport mode '" + c.transport.mode + "'");
  if (c.feedback_cap < 1) throw ConfigError("feedback_cap must be at least 1");
  if (c.syntax_rounds < 0) throw ConfigError("syntax_rounds must not be negative");
  return c;
}

}  // namespace llmpddl::workspace
