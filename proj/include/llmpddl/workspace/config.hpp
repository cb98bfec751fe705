#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "llmpddl/planner/planner.hpp"
#include "llmpddl/pddl/types.hpp"

namespace llmpddl::workspace {

inline constexpr int kSchemaVersion = 1;

class SchemaVersionMismatch : public std::runtime_error {
 public:
  SchemaVersionMismatch(int found, int expected);
  int found() const { return found_; }

 private:
  int found_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ActionDescription {
  std::string name;
  std::string text;
  std::string extra_info;

  friend bool operator==(const ActionDescription&, const ActionDescription&) = default;
};

struct TransportConfig {
  std::string mode = "replay";  // scripted | replay | record | live
  std::vector<std::string> cassettes;  // relative to the project root
  std::string endpoint;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";

  friend bool operator==(const TransportConfig&, const TransportConfig&) = default;
};

struct ProjectConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string domain_description;
  // (type, parent) in declaration order.
  std::vector<std::pair<std::string, std::string>> types;
  std::vector<ActionDescription> actions;
  TransportConfig transport;
  planner::SolveConfig planner;
  // The two fixed examples shown to the LLM planner.
  std::vector<std::string> planner_examples;
  int feedback_cap = 8;
  int syntax_rounds = 3;

  pddl::TypeHierarchy type_hierarchy() const;
  const ActionDescription* find_action(const std::string& name) const;
};

nlohmann::json to_json(const ProjectConfig& config);
// Throws SchemaVersionMismatch or ConfigError.
ProjectConfig config_from_json(const nlohmann::json& j);

}  // namespace llmpddl::workspace
