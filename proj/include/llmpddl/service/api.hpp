#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "llmpddl/correction/correction.hpp"
#include "llmpddl/llm/transport.hpp"
#include "llmpddl/workspace/project.hpp"

namespace llmpddl::service {

// Machine-readable error codes and their HTTP statuses.
//   bad-request 400, not-found 404, revision-in-flight 409, no-dialogue 409,
//   no-domain 409, project-locked 409, unprocessable 422,
//   untranslatable-goal 422, upstream 502, internal 500
struct ApiError {
  std::string code;
  std::string message;
  nlohmann::json detail = nullptr;

  int status() const;
  nlohmann::json to_json() const;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

ApiResponse error_response(const ApiError& e);

// Change feed entry.
struct ChangeEvent {
  std::uint64_t seq = 0;
  std::string type;  // feedback | run
  nlohmann::json data;
};

// The operations behind the /v1 API and the CLI. Reads are served from an
// immutable snapshot and never wait for writers; feedback is serialized
// per action (a second concurrent request gets 409).
class ApiService {
 public:
  // Loads the project; `transport` overrides the one in its config.
  explicit ApiService(const std::filesystem::path& root, std::unique_ptr<llm::Transport> transport = nullptr);
  ~ApiService();

  ApiResponse list_actions() const;
  ApiResponse get_action(const std::string& name) const;
  // body: {"text": "...", "issue"?: "...", "resolved"?: bool}
  ApiResponse post_feedback(const std::string& name, const std::string& body);
  // body: {"plan": "<plan text>", "task": "<id>"} or {"plan": ..., "problem": "<PDDL>"}
  ApiResponse validate(const std::string& body) const;
  // body: {"instruction"?: "...", "task": "<id>"} or {"instruction": ..., "problem": "<PDDL>"}
  ApiResponse plan(const std::string& body);
  // Same request bodies as validate().
  ApiResponse localize(const std::string& body) const;
  // Same request bodies as plan(); runs the back-prompting loop.
  ApiResponse llm_plan(const std::string& body);
  // Audit of the whole current domain.
  ApiResponse audit() const;
  ApiResponse runs() const;
  // Feedback ledger and per-mode solve counts over the run log (latest
  // record per task).
  ApiResponse report() const;
  // Runs construction and stores the draft. Refuses to overwrite an
  // existing draft unless `force`, which also drops the old dialogues.
  ApiResponse construct(bool force);
  // Events with seq > since; waits up to `timeout` for the first one.
  ApiResponse events(std::uint64_t since, std::chrono::milliseconds timeout) const;

  // Routes a request by method and path (without query string).
  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& query = {});

  const workspace::Project& project() const { return project_; }
  llm::Transport& transport() { return *transport_; }

 private:
  struct Snapshot;
  std::shared_ptr<const Snapshot> snapshot() const;
  void publish(std::shared_ptr<const Snapshot> s);
  std::shared_ptr<const Snapshot> make_snapshot() const;  // from session_, under write_mutex_
  void push_event(std::string type, nlohmann::json data);

  workspace::Project project_;
  std::unique_ptr<llm::Transport> transport_;
  std::unique_ptr<llm::ConversationStore> store_;
  std::unique_ptr<correction::CorrectionSession> session_;
  void reset_session();

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;

  std::mutex write_mutex_;  // session_ and project files
  std::mutex inflight_mutex_;
  std::set<std::string> inflight_;

  mutable std::mutex events_mutex_;
  mutable std::condition_variable events_cv_;
  std::vector<ChangeEvent> events_;
};

// Audits domain text that need not be part of a project.
ApiResponse audit_source(const std::string& domain_text);

// Reads a task or inline problem from a request body; throws ApiError.
pddl::ProblemSpec problem_from_request(const nlohmann::json& body, const workspace::Project& project,
                                       const pddl::DomainModel& domain, std::string* instruction = nullptr,
                                       std::string* task_id = nullptr);

}  // namespace llmpddl::service
