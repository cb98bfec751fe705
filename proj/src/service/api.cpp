#include "llmpddl/service/api.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

#include "llmpddl/builder/construction.hpp"
#include "llmpddl/engine/state.hpp"
#include "llmpddl/orchestrator/orchestrator.hpp"
#include "llmpddl/pddl/errors.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "llmpddl/planner/planner.hpp"
#include "llmpddl/workspace/transport.hpp"

namespace llmpddl::service {

using nlohmann::json;
namespace fs = std::filesystem;

int ApiError::status() const {
  static const std::map<std::string, int> statuses = {
      {"bad-request", 400},        {"not-found", 404},          {"revision-in-flight", 409}, {"no-dialogue", 409},
      {"no-domain", 409},          {"project-locked", 409},     {"unprocessable", 422},      {"untranslatable-goal", 422},
      {"upstream", 502},           {"internal", 500}};
  auto it = statuses.find(code);
  return it == statuses.end() ? 500 : it->second;
}

json ApiError::to_json() const { return {{"error", {{"code", code}, {"message", message}, {"detail", detail}}}}; }

ApiResponse error_response(const ApiError& e) { return {e.status(), e.to_json()}; }

struct ApiService::Snapshot {
  pddl::DomainModel domain;
  bool has_domain = false;
  builder::PredicateRegistry registry;
  json list = json::array();
  std::map<std::string, json> details;
};

namespace {

json parse_body(const std::string& body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw ApiError{"unprocessable", "request body must be a JSON object"};
    return j;
  } catch (const json::exception& e) {
    throw ApiError{"unprocessable", std::string("request body is not valid JSON: ") + e.what()};
  }
}

std::string string_field(const json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) throw ApiError{"unprocessable", std::string("missing field '") + key + "'"};
    return {};
  }
  if (!j[key].is_string()) throw ApiError{"unprocessable", std::string("field '") + key + "' must be a string"};
  return j[key].get<std::string>();
}

// Maps module exceptions to API errors; anything unexpected is internal.
ApiResponse guarded(const std::function<ApiResponse()>& fn) {
  try {
    return fn();
  } catch (const ApiError& e) {
    return error_response(e);
  } catch (const orchestrator::UntranslatableGoal& e) {
    return error_response({"untranslatable-goal", e.what(), {{"violation", e.violation()}, {"reply", e.reply()}}});
  } catch (const builder::ParseFailureAfterRetries& e) {
    return error_response({"upstream", e.what(), {{"action", e.action()}}});
  } catch (const llm::CassetteMiss& e) {
    return error_response({"upstream", e.what(), {{"digest", e.digest()}}});
  } catch (const llm::TransportError& e) {
    return error_response({"upstream", e.what()});
  } catch (const llm::ScriptExhausted& e) {
    return error_response({"upstream", e.what()});
  } catch (const planner::GroundingExplosion& e) {
    return error_response({"unprocessable", e.what()});
  } catch (const pddl::PddlError& e) {
    return error_response({"unprocessable", e.what()});
  } catch (const workspace::ProjectLocked& e) {
    return error_response({"project-locked", e.what()});
  } catch (const std::exception& e) {
    return error_response({"internal", e.what()});
  }
}

}  // namespace

pddl::ProblemSpec problem_from_request(const json& body, const workspace::Project& project,
                                       const pddl::DomainModel& domain, std::string* instruction, std::string* task_id) {
  std::string task = string_field(body, "task", false);
  if (!task.empty()) {
    for (auto& t : workspace::load_tasks(project, domain)) {
      if (t.id != task) continue;
      if (instruction && instruction->empty()) *instruction = t.instruction;
      if (task_id) *task_id = t.id;
      return t.problem;
    }
    throw ApiError{"not-found", "unknown task '" + task + "'"};
  }
  std::string text = string_field(body, "problem", false);
  if (text.empty()) throw ApiError{"unprocessable", "either 'task' or 'problem' is required"};
  auto p = pddl::parse_problem(text, domain);
  if (task_id) *task_id = p.name;
  return p;
}

ApiService::ApiService(const fs::path& root, std::unique_ptr<llm::Transport> transport)
    : project_(workspace::load(root)) {
  transport_ = transport ? std::move(transport) : workspace::make_transport(project_);
  store_ = std::make_unique<llm::ConversationStore>(project_.layout.conversations());
  reset_session();
}

void ApiService::reset_session() {
  std::map<std::string, llm::Conversation> conversations;
  for (const auto& id : store_->list()) conversations[id] = store_->load(id);
  pddl::DomainModel domain;
  domain.name = project_.config.name;
  if (const auto* d = project_.current()) domain = *d;
  session_ = std::make_unique<correction::CorrectionSession>(domain, project_.registry, std::move(conversations),
                                                             *transport_, project_.templates(), store_.get(),
                                                             project_.config.syntax_rounds);
  std::vector<correction::FeedbackEvent> events;
  for (const auto& e : workspace::load_events(project_)) events.push_back(correction::event_from_json(e));
  session_->set_events(std::move(events));
  publish(make_snapshot());
}

ApiService::~ApiService() = default;

std::shared_ptr<const ApiService::Snapshot> ApiService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void ApiService::publish(std::shared_ptr<const Snapshot> s) {
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(s);
}

std::shared_ptr<const ApiService::Snapshot> ApiService::make_snapshot() const {
  auto s = std::make_shared<Snapshot>();
  s->domain = session_->domain();
  s->has_domain = project_.current() != nullptr || !s->domain.actions.empty();
  s->registry = session_->registry();
  for (const auto& a : s->domain.actions) {
    auto report = session_->audit(a.name);
    int revisions = 0;
    json history = json::array();
    for (const auto& r : session_->revisions()) {
      if (r.action != a.name) continue;
      ++revisions;
      history.push_back(correction::to_json(r));
    }
    json events = json::array();
    for (const auto& e : session_->events()) {
      if (e.action == a.name) events.push_back(correction::to_json(e));
    }
    std::string status = report.clean() ? "clean" : report.has_blocking() ? "blocking" : "warnings";
    s->list.push_back({{"name", a.name},
                       {"audit", status},
                       {"findings", report.findings.size()},
                       {"revisions", revisions},
                       {"feedback_events", events.size()}});
    json nl = nullptr;
    try {
      nl = session_->render_nl(a.name);
    } catch (const correction::MissingDescription&) {
    }
    s->details[a.name] = {{"name", a.name},
                          {"pddl", pddl::print_action(a)},
                          {"nl", nl},
                          {"audit", audit::to_json(report)},
                          {"revisions", history},
                          {"events", events}};
  }
  return s;
}

void ApiService::push_event(std::string type, json data) {
  {
    std::lock_guard lock(events_mutex_);
    events_.push_back({events_.size() + 1, std::move(type), std::move(data)});
  }
  events_cv_.notify_all();
}

ApiResponse ApiService::list_actions() const { return {200, {{"actions", snapshot()->list}}}; }

ApiResponse ApiService::get_action(const std::string& name) const {
  auto s = snapshot();
  auto it = s->details.find(name);
  if (it == s->details.end()) return error_response({"not-found", "unknown action '" + name + "'"});
  return {200, it->second};
}

ApiResponse ApiService::post_feedback(const std::string& name, const std::string& body) {
  return guarded([&]() -> ApiResponse {
    if (!snapshot()->details.count(name)) throw ApiError{"not-found", "unknown action '" + name + "'"};
    json j = parse_body(body);
    std::string text = string_field(j, "text", true);
    if (text.empty()) throw ApiError{"unprocessable", "feedback text is empty"};
    correction::FeedbackRequest request{correction::Source::Human, text, string_field(j, "issue", false), true};
    if (j.contains("resolved")) {
      if (!j["resolved"].is_boolean()) throw ApiError{"unprocessable", "field 'resolved' must be a boolean"};
      request.resolved = j["resolved"].get<bool>();
    }
    {
      std::lock_guard lock(inflight_mutex_);
      if (!inflight_.insert(name).second) {
        throw ApiError{"revision-in-flight", "another revision of '" + name + "' is in progress"};
      }
    }
    struct Release {
      ApiService& self;
      const std::string& name;
      ~Release() {
        std::lock_guard lock(self.inflight_mutex_);
        self.inflight_.erase(name);
      }
    } release{*this, name};

    std::lock_guard write(write_mutex_);
    workspace::WriteLock lock(project_.layout.root);
    correction::ModelRevision rev;
    try {
      rev = session_->apply_feedback(name, request);
    } catch (const std::logic_error& e) {
      throw ApiError{"no-dialogue", e.what()};
    }
    project_.domain = session_->domain();
    project_.registry = session_->registry();
    workspace::save(project_);
    const auto& event = session_->events().back();
    workspace::append_event(project_, correction::to_json(event));
    publish(make_snapshot());
    push_event("feedback", {{"action", name}, {"revision", rev.index}, {"event", event.index}});
    return {200, {{"revision", correction::to_json(rev)}, {"audit", audit::to_json(rev.audit)}}};
  });
}

ApiResponse ApiService::validate(const std::string& body) const {
  return guarded([&]() -> ApiResponse {
    auto s = snapshot();
    if (!s->has_domain) throw ApiError{"no-domain", "the project has no domain yet"};
    json j = parse_body(body);
    auto plan = pddl::parse_plan(string_field(j, "plan", true));
    auto problem = problem_from_request(j, project_, s->domain);
    auto report = engine::validate_plan(s->domain, problem, plan);
    json out = engine::to_json(report);
    out["feedback"] = orchestrator::translate_validation_feedback(report, s->registry, project_.templates());
    return {200, out};
  });
}

ApiResponse ApiService::plan(const std::string& body) {
  return guarded([&]() -> ApiResponse {
    auto s = snapshot();
    if (!s->has_domain) throw ApiError{"no-domain", "the project has no domain yet"};
    json j = parse_body(body);
    std::string instruction = string_field(j, "instruction", false);
    std::string task;
    auto problem = problem_from_request(j, project_, s->domain, &instruction, &task);
    if (instruction.empty()) throw ApiError{"unprocessable", "missing field 'instruction'"};
    problem.goal.clear();
    orchestrator::Instruction instr{task, instruction, problem};

    std::lock_guard write(write_mutex_);
    orchestrator::Gateway gateway{*transport_, project_.templates(), store_.get(), project_.config.domain_description};
    try {
      auto r = orchestrator::classical_pipeline(instr, s->domain, s->registry, gateway, project_.config.planner);
      auto record = orchestrator::to_json(r.record);
      workspace::append_run(project_, record);
      push_event("run", record);
      json out = planner::to_json(r.plan);
      json goal = json::array();
      for (const auto& l : r.goal) goal.push_back(pddl::to_string(l));
      out["goal"] = goal;
      out["run"] = record;
      return {200, out};
    } catch (const orchestrator::UntranslatableGoal& e) {
      auto record = orchestrator::to_json(orchestrator::invalid_translation_record(instr, "classical", e));
      workspace::append_run(project_, record);
      push_event("run", record);
      throw;
    }
  });
}

ApiResponse ApiService::localize(const std::string& body) const {
  return guarded([&]() -> ApiResponse {
    auto s = snapshot();
    if (!s->has_domain) throw ApiError{"no-domain", "the project has no domain yet"};
    json j = parse_body(body);
    auto plan = pddl::parse_plan(string_field(j, "plan", true));
    auto problem = problem_from_request(j, project_, s->domain);
    return {200, engine::to_json(engine::localize_error(s->domain, problem, plan))};
  });
}

ApiResponse ApiService::llm_plan(const std::string& body) {
  return guarded([&]() -> ApiResponse {
    auto s = snapshot();
    if (!s->has_domain) throw ApiError{"no-domain", "the project has no domain yet"};
    json j = parse_body(body);
    std::string instruction = string_field(j, "instruction", false);
    std::string task;
    auto problem = problem_from_request(j, project_, s->domain, &instruction, &task);
    if (instruction.empty()) throw ApiError{"unprocessable", "missing field 'instruction'"};
    problem.goal.clear();
    orchestrator::Instruction instr{task, instruction, problem};

    std::lock_guard write(write_mutex_);
    orchestrator::Gateway gateway{*transport_, project_.templates(), store_.get(), project_.config.domain_description};
    auto start = std::chrono::steady_clock::now();
    auto outcome = orchestrator::llm_plan_loop(instr, s->domain, s->registry, gateway,
                                               {project_.config.feedback_cap, project_.config.planner_examples});
    orchestrator::RunRecord record{task, "llm", outcome.rounds, orchestrator::to_string(outcome.status),
                                   outcome.status == orchestrator::LoopStatus::Success ? outcome.plan : pddl::Plan{},
                                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
                                   {{"feedback_messages", outcome.feedback_messages},
                                    {"duplicate_plan", outcome.duplicate_plan},
                                    {"transcript", outcome.transcript}}};
    auto rec = orchestrator::to_json(record);
    workspace::append_run(project_, rec);
    push_event("run", rec);
    json out = orchestrator::to_json(outcome);
    out["run"] = rec;
    return {200, out};
  });
}

ApiResponse ApiService::audit() const {
  return guarded([&]() -> ApiResponse {
    auto s = snapshot();
    if (!s->has_domain) throw ApiError{"no-domain", "the project has no domain yet"};
    audit::Auditor auditor(project_.templates());
    auto report = auditor.audit_domain(s->domain);
    json out = audit::to_json(report);
    out["feedback"] = auditor.render_feedback(report);
    return {200, out};
  });
}

ApiResponse audit_source(const std::string& domain_text) {
  return guarded([&]() -> ApiResponse {
    audit::Auditor auditor;
    auto report = auditor.audit_source(domain_text);
    json out = audit::to_json(report);
    out["feedback"] = auditor.render_feedback(report);
    return {200, out};
  });
}

ApiResponse ApiService::report() const {
  return guarded([&]() -> ApiResponse {
    std::vector<correction::FeedbackEvent> events;
    {
      auto s = snapshot();
      for (const auto& [name, detail] : s->details) {
        for (const auto& e : detail["events"]) events.push_back(correction::event_from_json(e));
      }
    }
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    // Latest record per (mode, task).
    std::map<std::string, std::map<std::string, json>> latest;
    for (const auto& r : workspace::load_runs(project_)) {
      latest[r.value("mode", "")][r.value("task", "")] = r;
    }
    json modes = json::array();
    for (const auto& [mode, tasks] : latest) {
      int solved = 0;
      json failed = json::array();
      for (const auto& [task, r] : tasks) {
        if (r.value("outcome", "") == "success") {
          ++solved;
        } else {
          failed.push_back({{"task", task}, {"outcome", r.value("outcome", "")}});
        }
      }
      int total = static_cast<int>(tasks.size());
      modes.push_back({{"mode", mode},
                       {"tasks", total},
                       {"solved", solved},
                       {"rate", total ? static_cast<double>(solved) / total : 0.0},
                       {"failed", failed}});
    }
    return {200, {{"ledger", correction::to_json(correction::feedback_ledger(events))}, {"runs", modes}}};
  });
}

ApiResponse ApiService::construct(bool force) {
  return guarded([&]() -> ApiResponse {
    std::lock_guard write(write_mutex_);
    workspace::WriteLock lock(project_.layout.root);
    if (project_.draft && !force) {
      throw ApiError{"bad-request", "the project already has a draft domain; pass force to rebuild it"};
    }
    if (force) {
      for (const auto& id : store_->list()) {
        if (id.starts_with("construct-")) fs::remove(store_->path(id));
      }
      fs::remove(project_.layout.domain());
      project_.domain.reset();
    }
    builder::ConstructionSession construction(project_.config, *transport_, project_.templates(), store_.get());
    auto built = construction.build_domain();
    project_.draft = built.draft;
    project_.registry = built.registry;
    workspace::save(project_);
    reset_session();
    audit::Auditor auditor(project_.templates());
    auto report = auditor.audit_domain(built.draft);
    json out = {{"domain", pddl::print_domain(built.draft)},
                {"actions", built.draft.actions.size()},
                {"predicates", built.draft.predicates.size()},
                {"audit", audit::to_json(report)}};
    push_event("construct", {{"actions", built.draft.actions.size()}});
    return {200, out};
  });
}

ApiResponse ApiService::runs() const {
  return guarded([&]() -> ApiResponse { return {200, {{"runs", workspace::load_runs(project_)}}}; });
}

ApiResponse ApiService::events(std::uint64_t since, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(events_mutex_);
  events_cv_.wait_for(lock, timeout, [&] { return !events_.empty() && events_.back().seq > since; });
  json list = json::array();
  for (const auto& e : events_) {
    if (e.seq > since) list.push_back({{"seq", e.seq}, {"type", e.type}, {"data", e.data}});
  }
  std::uint64_t next = events_.empty() ? since : std::max<std::uint64_t>(since, events_.back().seq);
  return {200, {{"events", list}, {"next", next}}};
}

ApiResponse ApiService::handle(const std::string& method, const std::string& path, const std::string& body,
                               const std::map<std::string, std::string>& query) {
  const std::string prefix = "/v1/";
  if (!path.starts_with(prefix)) return error_response({"not-found", "no route for " + path});
  std::string rest = path.substr(prefix.size());
  std::vector<std::string> parts;
  for (std::size_t start = 0; start <= rest.size();) {
    auto slash = rest.find('/', start);
    if (slash == std::string::npos) slash = rest.size();
    parts.push_back(rest.substr(start, slash - start));
    start = slash + 1;
  }
  auto route = [&](const char* m, std::size_t n, const char* head) {
    return method == m && parts.size() == n && parts[0] == head;
  };
  if (route("GET", 1, "actions")) return list_actions();
  if (route("GET", 2, "actions")) return get_action(parts[1]);
  if (route("POST", 3, "actions") && parts[2] == "feedback") return post_feedback(parts[1], body);
  if (route("POST", 1, "validate")) return validate(body);
  if (route("POST", 1, "plan")) return plan(body);
  if (route("POST", 1, "localize")) return localize(body);
  if (route("POST", 1, "llm-plan")) return llm_plan(body);
  if (route("GET", 1, "audit")) return audit();
  if (route("POST", 1, "audit")) {
    return guarded([&] { return audit_source(string_field(parse_body(body), "domain", true)); });
  }
  if (route("GET", 1, "runs")) return runs();
  if (route("GET", 1, "report")) return report();
  if (route("GET", 1, "events")) {
    std::uint64_t since = 0;
    long timeout_ms = 25'000;
    try {
      if (auto it = query.find("since"); it != query.end()) since = std::stoull(it->second);
      if (auto it = query.find("timeout"); it != query.end()) timeout_ms = static_cast<long>(std::stod(it->second) * 1000);
    } catch (const std::exception&) {
      return error_response({"bad-request", "'since' and 'timeout' must be numbers"});
    }
    timeout_ms = std::clamp(timeout_ms, 0L, 60'000L);
    return events(since, std::chrono::milliseconds(timeout_ms));
  }
  return error_response({"not-found", "no route for " + method + " " + path});
}

}  // namespace llmpddl::service
