#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "llmpddl/engine/state.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/printer.hpp"
#include "llmpddl/planner/planner.hpp"

namespace llmpddl::planner {

namespace fs = std::filesystem;

ExternalPlannerFailure::ExternalPlannerFailure(const std::string& message, std::string output)
    : std::runtime_error(message), output_(std::move(output)) {}

namespace {

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  for (std::size_t at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

PlanResult run_external(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem,
                        const std::string& command) {
  auto start = std::chrono::steady_clock::now();
  std::string pattern = (fs::temp_directory_path() / "llmpddl-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw ExternalPlannerFailure("cannot create a temporary directory", "");
  fs::path dir = pattern;
  fs::path domain_file = dir / "domain.pddl";
  fs::path problem_file = dir / "problem.pddl";
  fs::path plan_file = dir / "plan.txt";
  std::ofstream(domain_file) << pddl::print_domain(domain);
  std::ofstream(problem_file) << pddl::print_problem(problem);

  std::string cmd = command;
  replace_all(cmd, "{domain}", shell_quote(domain_file.string()));
  replace_all(cmd, "{problem}", shell_quote(problem_file.string()));
  replace_all(cmd, "{plan}", shell_quote(plan_file.string()));
  cmd += " 2>&1";

  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    fs::remove_all(dir);
    throw ExternalPlannerFailure("cannot start external planner", "");
  }
  std::array<char, 4096> buffer{};
  while (std::size_t read = std::fread(buffer.data(), 1, buffer.size(), pipe)) output.append(buffer.data(), read);
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

  PlanResult result;
  result.backend = "external";
  if (code != 0) {
    fs::remove_all(dir);
    throw ExternalPlannerFailure("external planner exited with status " + std::to_string(code), output);
  }
  if (!fs::exists(plan_file)) {
    fs::remove_all(dir);
    throw ExternalPlannerFailure("external planner wrote no plan file", output);
  }
  std::stringstream text;
  text << std::ifstream(plan_file).rdbuf();
  fs::remove_all(dir);
  try {
    result.plan = pddl::parse_plan(text.str());
  } catch (const std::exception& e) {
    throw ExternalPlannerFailure(std::string("unparseable plan: ") + e.what(), output);
  }
  result.outcome = Outcome::Solved;
  result.stats.plan_length = result.plan.steps.size();
  result.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

PlanResult solve(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem, const SolveConfig& config) {
  PlanResult result;
  if (!config.external_command.empty()) {
    result = run_external(domain, problem, config.external_command);
    auto report = engine::validate_plan(domain, problem, result.plan);
    if (!report.valid) {
      throw ExternalPlannerFailure("external planner returned an invalid plan",
                                   engine::to_json(report).dump());
    }
    return result;
  }
  auto start = std::chrono::steady_clock::now();
  GroundTask task = ground(domain, problem, config.grounding);
  result = search(task, config.search);
  result.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.outcome == Outcome::Solved) {
    auto report = engine::validate_plan(domain, problem, result.plan);
    if (!report.valid) throw std::logic_error("planner produced an invalid plan: " + engine::to_json(report).dump());
  }
  return result;
}

}  // namespace llmpddl::planner
