#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "llmpddl/service/api.hpp"
#include "llmpddl/service/http.hpp"
#include "llmpddl/workspace/config.hpp"
#include "llmpddl/workspace/project.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
namespace svc = llmpddl::service;
namespace ws = llmpddl::workspace;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string project = ".";
  std::string format = "text";
  bool structured() const { return format == "structured"; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code(const svc::ApiResponse& r) {
  if (r.status < 300) return kOk;
  return r.status == 400 || r.status == 404 ? kUsageError : kDomainError;
}

// Prints an error response; returns its exit code.
int report_error(const Options& o, const svc::ApiResponse& r) {
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
  } else {
    const auto& e = r.body["error"];
    std::cerr << "error: " << e.value("message", "") << " (" << e.value("code", "") << ")\n";
  }
  return exit_code(r);
}

void print_lines(const json& list, const std::string& indent = "  ") {
  for (const auto& l : list) std::cout << indent << l.get<std::string>() << "\n";
}

void print_steps(const json& steps) {
  int i = 0;
  for (const auto& s : steps) std::cout << "  " << ++i << ". " << s.get<std::string>() << "\n";
}

// Request body naming the problem: a task id or a problem file.
json problem_body(const std::string& task, const std::string& problem_file) {
  if (!task.empty() && !problem_file.empty()) throw UsageError("give either --task or --problem, not both");
  if (!task.empty()) return {{"task", task}};
  if (!problem_file.empty()) return {{"problem", read_file(problem_file)}};
  throw UsageError("a problem is required: pass --task <id> or --problem <file>");
}

int cmd_init(const Options& o, const std::string& config_file, const std::string& name) {
  ws::ProjectConfig config;
  if (!config_file.empty()) {
    config = ws::config_from_json(json::parse(read_file(config_file)));
  } else if (!name.empty()) {
    config.name = name;
  } else {
    throw UsageError("init needs --config <file> or --name <name>");
  }
  auto project = ws::init(o.project, config);
  json out = {{"project", fs::absolute(project.layout.root).string()}, {"name", project.config.name}};
  if (o.structured()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "initialized project " << config.name << " in " << project.layout.root.string() << "\n";
  }
  return kOk;
}

int cmd_construct(const Options& o, bool force) {
  svc::ApiService api(o.project);
  auto r = api.construct(force);
  if (r.status != 200) return report_error(o, r);
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
  } else {
    std::cout << "built draft domain: " << r.body["actions"] << " actions, " << r.body["predicates"]
              << " predicates\n";
    for (const auto& f : r.body["audit"]["findings"]) std::cout << "  " << f["message"].get<std::string>() << "\n";
  }
  return kOk;
}

int cmd_audit(const Options& o, const std::string& domain_file) {
  svc::ApiResponse r;
  if (!domain_file.empty()) {
    r = svc::audit_source(read_file(domain_file));
  } else {
    svc::ApiService api(o.project);
    r = api.audit();
  }
  if (r.status != 200) return report_error(o, r);
  bool clean = r.body["clean"].get<bool>();
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
  } else if (clean) {
    std::cout << "no findings\n";
  } else {
    std::cout << r.body["feedback"].get<std::string>() << "\n";
  }
  return clean ? kOk : kDomainError;
}

void print_revision(const json& body) {
  const auto& rev = body["revision"];
  std::cout << "revision " << rev["index"] << " of " << rev["action"].get<std::string>() << "\n";
  const auto& diff = rev["diff"];
  if (diff["removed"].empty() && diff["added"].empty()) std::cout << "  (no change)\n";
  print_lines(diff["removed"], "  - ");
  print_lines(diff["added"], "  + ");
  if (body["audit"]["clean"].get<bool>()) {
    std::cout << "audit: clean\n";
  } else {
    std::cout << "audit:\n";
    for (const auto& f : body["audit"]["findings"]) std::cout << "  " << f["message"].get<std::string>() << "\n";
  }
  if (rev["introduced_new_errors"].get<bool>()) std::cout << "warning: this revision introduced new errors\n";
}

int cmd_correct(const Options& o, const std::string& action, const std::vector<std::string>& texts) {
  svc::ApiService api(o.project);
  auto detail = api.get_action(action);
  if (detail.status != 200) return report_error(o, detail);
  auto submit = [&](const std::string& text) {
    auto r = api.post_feedback(action, json{{"text", text}}.dump());
    if (r.status != 200) return report_error(o, r);
    if (o.structured()) {
      std::cout << r.body.dump() << "\n";
    } else {
      print_revision(r.body);
    }
    return kOk;
  };
  if (!texts.empty()) {
    for (const auto& t : texts) {
      if (int rc = submit(t)) return rc;
    }
    return kOk;
  }
  // Interactive: one feedback message per line until an empty line or EOF.
  if (!o.structured()) {
    const auto& nl = detail.body["nl"];
    std::cout << (nl.is_string() ? nl.get<std::string>() : detail.body["pddl"].get<std::string>()) << "\n";
  }
  std::string line;
  while (true) {
    if (!o.structured()) std::cout << "feedback> " << std::flush;
    if (!std::getline(std::cin, line) || line.empty()) break;
    if (int rc = submit(line)) return rc;
    if (!o.structured()) {
      const auto& nl = api.get_action(action).body["nl"];
      if (nl.is_string()) std::cout << nl.get<std::string>() << "\n";
    }
  }
  return kOk;
}

int cmd_validate(const Options& o, const std::string& plan_file, const std::string& task, const std::string& problem,
                 bool localize) {
  json body = problem_body(task, problem);
  body["plan"] = read_file(plan_file);
  svc::ApiService api(o.project);
  auto r = localize ? api.localize(body.dump()) : api.validate(body.dump());
  if (r.status != 200) return report_error(o, r);
  bool ok = localize ? r.body["failing_step"].is_null() : r.body["verdict"] == "valid";
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
  } else if (localize) {
    if (ok) {
      std::cout << "no failing step\n";
    } else {
      std::cout << "failing step: " << r.body["failing_step"] << "\nunmet:\n";
      print_lines(r.body["unmet"]);
      std::cout << "suspect actions:\n";
      print_lines(r.body["suspect_actions"]);
    }
  } else if (ok) {
    std::cout << "plan is valid\n";
  } else {
    std::cout << "plan is invalid\n" << r.body["feedback"].get<std::string>() << "\n";
  }
  return ok ? kOk : kDomainError;
}

void print_plan_result(const json& body) {
  std::cout << "goal:\n";
  print_lines(body["goal"]);
  std::cout << "outcome: " << body["outcome"].get<std::string>() << "\n";
  if (body["outcome"] == "plan") {
    std::cout << "plan (" << body["plan"].size() << " steps):\n";
    print_steps(body["plan"]);
  }
}

int cmd_plan(const Options& o, const std::string& instruction, const std::string& task, const std::string& problem,
             bool all) {
  svc::ApiService api(o.project);
  if (all) {
    if (!task.empty() || !problem.empty() || !instruction.empty()) throw UsageError("--all takes no other arguments");
    const auto* domain = api.project().current();
    if (!domain) return report_error(o, svc::error_response({"no-domain", "the project has no domain yet"}));
    int solved = 0, total = 0;
    for (const auto& t : ws::load_tasks(api.project(), *domain)) {
      auto r = api.plan(json{{"task", t.id}}.dump());
      ++total;
      bool ok = r.status == 200 && r.body["run"]["outcome"] == "success";
      solved += ok;
      if (o.structured()) {
        std::cout << json{{"task", t.id}, {"status", r.status}, {"body", r.body}}.dump() << "\n";
      } else {
        std::string what = r.status == 200 ? r.body["run"]["outcome"].get<std::string>()
                                           : r.body["error"]["code"].get<std::string>();
        std::cout << t.id << ": " << what << "\n";
      }
    }
    if (!o.structured()) std::cout << solved << "/" << total << " solved\n";
    return solved == total ? kOk : kDomainError;
  }
  json body = problem_body(task, problem);
  if (!instruction.empty()) body["instruction"] = instruction;
  auto r = api.plan(body.dump());
  if (r.status != 200) return report_error(o, r);
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
  } else {
    print_plan_result(r.body);
  }
  return r.body["run"]["outcome"] == "success" ? kOk : kDomainError;
}

int cmd_llm_plan(const Options& o, const std::string& instruction, const std::string& task,
                 const std::string& problem) {
  json body = problem_body(task, problem);
  if (!instruction.empty()) body["instruction"] = instruction;
  svc::ApiService api(o.project);
  auto r = api.llm_plan(body.dump());
  if (r.status != 200) return report_error(o, r);
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
  } else {
    std::cout << "status: " << r.body["status"].get<std::string>() << " after " << r.body["rounds"] << " round(s)\n";
    if (r.body["duplicate_plan"].get<bool>()) std::cout << "the planner repeated an earlier plan\n";
    if (r.body["status"] == "success") {
      std::cout << "plan (" << r.body["plan"].size() << " steps):\n";
      print_steps(r.body["plan"]);
    }
    std::cout << "transcript: " << r.body["transcript"].get<std::string>() << "\n";
  }
  return r.body["status"] == "success" ? kOk : kDomainError;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

int cmd_report(const Options& o, bool run) {
  if (run) {
    Options quiet = o;
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    int rc = cmd_plan(quiet, "", "", "", true);
    std::cout.rdbuf(old);
    if (rc == kUsageError) return rc;
  }
  svc::ApiService api(o.project);
  auto r = api.report();
  if (r.status != 200) return report_error(o, r);
  if (o.structured()) {
    std::cout << r.body.dump(2) << "\n";
    return kOk;
  }
  const auto& ledger = r.body["ledger"];
  std::cout << "Feedback ledger\n";
  if (ledger["per_action"].empty()) std::cout << "  (no feedback recorded)\n";
  if (!ledger["per_action"].empty()) {
    std::cout << "  " << pad("action", 28) << pad("auditor", 9) << pad("human", 7) << "validation\n";
    for (const auto& [action, c] : ledger["per_action"].items()) {
      std::cout << "  " << pad(action, 28) << pad(c["auditor"].dump(), 9) << pad(c["human"].dump(), 7)
                << c["plan_validation"].dump() << "\n";
    }
  }
  std::cout << "  human messages: " << ledger["total_human_messages"] << "\n"
            << "  errors resolved: " << ledger["errors_resolved"] << "\n"
            << "  extra rounds: " << ledger["extra_rounds"] << "\n\n";
  std::cout << "Runs\n";
  if (r.body["runs"].empty()) std::cout << "  (no runs recorded)\n";
  for (const auto& m : r.body["runs"]) {
    char rate[16];
    std::snprintf(rate, sizeof rate, "%.0f%%", m["rate"].get<double>() * 100);
    std::cout << "  " << pad(m["mode"].get<std::string>(), 10) << m["solved"] << "/" << m["tasks"] << " solved ("
              << rate << ")\n";
    for (const auto& f : m["failed"]) {
      std::cout << "    " << f["task"].get<std::string>() << ": " << f["outcome"].get<std::string>() << "\n";
    }
  }
  return kOk;
}

int cmd_serve(const Options& o, const std::string& host, int port, const std::string& static_dir) {
  svc::ApiService api(o.project);
  std::optional<fs::path> dir;
  if (!static_dir.empty()) {
    if (!fs::is_directory(static_dir)) throw UsageError("no such directory: " + static_dir);
    dir = static_dir;
  }
  svc::HttpServer server(api, dir);
  if (port == 0) {
    port = server.bind_any_port(host);
    if (port < 0) throw UsageError("cannot bind " + host);
  } else if (!server.bind(host, port)) {
    throw UsageError("cannot bind " + host + ":" + std::to_string(port));
  }
  std::cerr << "serving " << api.project().config.name << " on http://" << host << ":" << port << "\n";
  return server.listen_after_bind() ? kOk : kDomainError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build, correct and use PDDL domain models with an LLM in the loop.", "llmpddl"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-C,--project", o.project, "Project directory")->capture_default_str();
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  std::string config_file, name;
  auto* init = app.add_subcommand("init", "Create a project directory");
  init->add_option("--config", config_file, "Project config (JSON)");
  init->add_option("--name", name, "Domain name for an empty project");

  bool force = false;
  auto* construct = app.add_subcommand("construct", "Build the draft domain action by action");
  construct->add_flag("--force", force, "Rebuild an existing draft");

  std::string domain_file;
  auto* audit = app.add_subcommand("audit", "Check the domain for syntax and consistency errors");
  audit->add_option("--domain", domain_file, "Audit this domain file instead of the project");

  std::string action;
  std::vector<std::string> texts;
  auto* correct = app.add_subcommand("correct", "Review an action and give corrective feedback");
  correct->add_option("--action", action, "Action name")->required();
  correct->add_option("--text", texts, "Feedback message (repeatable); reads stdin when absent");

  std::string plan_file, task, problem;
  auto* validate = app.add_subcommand("validate", "Validate a plan");
  validate->add_option("plan-file", plan_file, "One (action arg ...) per line")->required();
  validate->add_option("--task", task, "Task id");
  validate->add_option("--problem", problem, "Problem file");

  auto* localize = app.add_subcommand("localize", "Find the first failing step of a plan");
  localize->add_option("plan-file", plan_file, "One (action arg ...) per line")->required();
  localize->add_option("--task", task, "Task id");
  localize->add_option("--problem", problem, "Problem file");

  std::string instruction;
  bool all = false;
  auto* plan = app.add_subcommand("plan", "Translate an instruction to a goal and plan with the classical planner");
  plan->add_option("instruction", instruction, "Instruction (defaults to the task's)");
  plan->add_option("--task", task, "Task id");
  plan->add_option("--problem", problem, "Problem file");
  plan->add_flag("--all", all, "Plan every task of the project");

  auto* llm_plan = app.add_subcommand("llm-plan", "Plan with the LLM and validator feedback");
  llm_plan->add_option("instruction", instruction, "Instruction (defaults to the task's)");
  llm_plan->add_option("--task", task, "Task id");
  llm_plan->add_option("--problem", problem, "Problem file");

  bool run = false;
  auto* report = app.add_subcommand("report", "Summarize the feedback ledger and the run log");
  report->add_flag("--run", run, "Plan every task first");

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host, "Address to bind")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of console assets to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*init) return cmd_init(o, config_file, name);
    if (*construct) return cmd_construct(o, force);
    if (*audit) return cmd_audit(o, domain_file);
    if (*correct) return cmd_correct(o, action, texts);
    if (*validate) return cmd_validate(o, plan_file, task, problem, false);
    if (*localize) return cmd_validate(o, plan_file, task, problem, true);
    if (*plan) return cmd_plan(o, instruction, task, problem, all);
    if (*llm_plan) return cmd_llm_plan(o, instruction, task, problem);
    if (*report) return cmd_report(o, run);
    if (*serve) return cmd_serve(o, host, port, static_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  } catch (const ws::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ws::SchemaVersionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ws::CorruptArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}
