#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmpddl/builder/registry.hpp"
#include "llmpddl/llm/template.hpp"
#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/workspace/config.hpp"

namespace llmpddl::workspace {

namespace fs = std::filesystem;

class CorruptArtifact : public std::runtime_error {
 public:
  CorruptArtifact(fs::path path, const std::string& why);
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Registry and domain file disagree about the predicate set.
class InconsistentArtifacts : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ProjectLocked : public std::runtime_error {
 public:
  explicit ProjectLocked(const fs::path& root);
};

// A task: an instruction over a problem whose goal is the reference
// translation.
struct Task {
  std::string id;
  std::string instruction;
  pddl::ProblemSpec problem;
};

// Files under the project root.
struct Layout {
  fs::path root;

  fs::path config() const { return root / "project.cfg"; }
  fs::path templates() const { return root / "templates"; }
  fs::path conversations() const { return root / "conversations"; }
  fs::path draft() const { return root / "domain.draft.pddl"; }
  fs::path domain() const { return root / "domain.pddl"; }
  fs::path registry() const { return root / "predicates.txt"; }
  fs::path runs() const { return root / "runs"; }
  fs::path events() const { return root / "events.jsonl"; }
  fs::path cassettes() const { return root / "cassettes"; }
  fs::path tasks() const { return root / "tasks"; }
  fs::path lock() const { return root / ".lock"; }
};

struct Project {
  Layout layout;
  ProjectConfig config;
  std::optional<pddl::DomainModel> draft;   // construction output
  std::optional<pddl::DomainModel> domain;  // after correction
  builder::PredicateRegistry registry;

  // The corrected domain when present, else the draft.
  const pddl::DomainModel* current() const;
  llm::TemplateSet templates() const;
};

// Creates the layout and writes project.cfg. Refuses a directory that
// already holds a project.
Project init(const fs::path& root, const ProjectConfig& config);
// Throws SchemaVersionMismatch, CorruptArtifact.
Project load(const fs::path& root);
// Writes config, domain files and registry; each file is replaced
// atomically. Throws InconsistentArtifacts before writing anything.
void save(const Project& project);

// Advisory exclusive lock on <root>/.lock for the lifetime of the object.
// Readers do not lock.
class WriteLock {
 public:
  explicit WriteLock(const fs::path& root);
  ~WriteLock();
  WriteLock(const WriteLock&) = delete;
  WriteLock& operator=(const WriteLock&) = delete;

 private:
  int fd_ = -1;
};

// JSON-lines logs. Readers reject malformed lines with CorruptArtifact.
void append_jsonl(const fs::path& file, const nlohmann::json& record);
std::vector<nlohmann::json> read_jsonl(const fs::path& file);

// runs/runs.jsonl
void append_run(const Project& project, const nlohmann::json& record);
std::vector<nlohmann::json> load_runs(const Project& project);

// events.jsonl (feedback events of the correction loop)
void append_event(const Project& project, const nlohmann::json& event);
std::vector<nlohmann::json> load_events(const Project& project);

// tasks/tasks.json lists {id, instruction, problem}; each problem is a
// PDDL file in tasks/ checked against `domain`.
std::vector<Task> load_tasks(const Project& project, const pddl::DomainModel& domain);
void save_tasks(const Project& project, const std::vector<Task>& tasks);

// Replaces `path` with `text` via a temporary file and rename.
void write_atomic(const fs::path& path, const std::string& text);

}  // namespace llmpddl::workspace
