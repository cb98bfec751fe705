#include "llmpddl/workspace/project.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <set>
#include <sstream>

#include "llmpddl/pddl/errors.hpp"
#include "llmpddl/pddl/parser.hpp"
#include "llmpddl/pddl/printer.hpp"

namespace llmpddl::workspace {

using nlohmann::json;

CorruptArtifact::CorruptArtifact(fs::path path, const std::string& why)
    : std::runtime_error(path.string() + ": " + why), path_(std::move(path)) {}

ProjectLocked::ProjectLocked(const fs::path& root)
    : std::runtime_error("project " + root.string() + " is locked by another writer") {}

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptArtifact(path, "cannot read");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<pddl::DomainModel> read_domain(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    // Drafts may still carry the errors the auditor reports.
    return pddl::parse_domain(read_text(path), {.check_types = false});
  } catch (const pddl::PddlError& e) {
    throw CorruptArtifact(path, e.what());
  }
}

std::set<std::string> signatures(const std::vector<pddl::PredicateDef>& preds) {
  std::set<std::string> out;
  for (const auto& p : preds) out.insert(pddl::signature(p));
  return out;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

const pddl::DomainModel* Project::current() const {
  if (domain) return &*domain;
  if (draft) return &*draft;
  return nullptr;
}

llm::TemplateSet Project::templates() const {
  return fs::exists(layout.templates()) ? llm::TemplateSet::load(layout.templates()) : llm::TemplateSet();
}

Project init(const fs::path& root, const ProjectConfig& config) {
  Layout layout{root};
  if (fs::exists(layout.config())) throw ConfigError(root.string() + " already holds a project");
  for (const auto& dir : {layout.root, layout.templates(), layout.conversations(), layout.runs(), layout.cassettes(),
                          layout.tasks()}) {
    fs::create_directories(dir);
  }
  Project p{layout, config, std::nullopt, std::nullopt, {}};
  save(p);
  return p;
}

Project load(const fs::path& root) {
  Project p;
  p.layout = Layout{root};
  if (!fs::exists(p.layout.config())) throw ConfigError("no project at " + root.string());
  json cfg;
  try {
    cfg = json::parse(read_text(p.layout.config()));
  } catch (const json::exception& e) {
    throw CorruptArtifact(p.layout.config(), e.what());
  }
  try {
    p.config = config_from_json(cfg);
  } catch (const ConfigError& e) {
    throw CorruptArtifact(p.layout.config(), e.what());
  }
  p.draft = read_domain(p.layout.draft());
  p.domain = read_domain(p.layout.domain());
  if (fs::exists(p.layout.registry())) {
    try {
      p.registry = builder::PredicateRegistry::from_text(read_text(p.layout.registry()));
    } catch (const builder::CorruptRegistry& e) {
      throw CorruptArtifact(p.layout.registry(), e.what());
    }
  }
  return p;
}

void save(const Project& project) {
  const Layout& l = project.layout;
  if (const pddl::DomainModel* d = project.current()) {
    if (signatures(d->predicates) != signatures(project.registry.entries())) {
      throw InconsistentArtifacts("predicates.txt and " +
                                  (project.domain ? l.domain() : l.draft()).filename().string() +
                                  " declare different predicates");
    }
  }
  fs::create_directories(l.root);
  write_atomic(l.config(), to_json(project.config).dump(2) + "\n");
  if (project.draft) write_atomic(l.draft(), pddl::print_domain(*project.draft));
  if (project.domain) write_atomic(l.domain(), pddl::print_domain(*project.domain));
  write_atomic(l.registry(), project.registry.to_text());
}

WriteLock::WriteLock(const fs::path& root) {
  fs::create_directories(root);
  fd_ = ::open(Layout{root}.lock().c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::runtime_error("cannot open lock file in " + root.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    throw ProjectLocked(root);
  }
}

WriteLock::~WriteLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void append_jsonl(const fs::path& file, const json& record) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::app | std::ios::binary);
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + file.string());
}

std::vector<json> read_jsonl(const fs::path& file) {
  std::vector<json> out;
  if (!fs::exists(file)) return out;
  std::ifstream in(file, std::ios::binary);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw CorruptArtifact(file, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void append_run(const Project& project, const json& record) {
  append_jsonl(project.layout.runs() / "runs.jsonl", record);
}
std::vector<json> load_runs(const Project& project) { return read_jsonl(project.layout.runs() / "runs.jsonl"); }

void append_event(const Project& project, const json& event) { append_jsonl(project.layout.events(), event); }
std::vector<json> load_events(const Project& project) { return read_jsonl(project.layout.events()); }

std::vector<Task> load_tasks(const Project& project, const pddl::DomainModel& domain) {
  fs::path index = project.layout.tasks() / "tasks.json";
  std::vector<Task> out;
  if (!fs::exists(index)) return out;
  json j;
  try {
    j = json::parse(read_text(index));
  } catch (const json::exception& e) {
    throw CorruptArtifact(index, e.what());
  }
  for (const auto& entry : j) {
    Task t;
    fs::path file;
    try {
      t.id = entry.at("id").get<std::string>();
      t.instruction = entry.at("instruction").get<std::string>();
      file = project.layout.tasks() / entry.at("problem").get<std::string>();
    } catch (const json::exception& e) {
      throw CorruptArtifact(index, e.what());
    }
    try {
      t.problem = pddl::parse_problem(read_text(file), domain);
    } catch (const pddl::PddlError& e) {
      throw CorruptArtifact(file, e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

void save_tasks(const Project& project, const std::vector<Task>& tasks) {
  fs::create_directories(project.layout.tasks());
  json index = json::array();
  for (const auto& t : tasks) {
    std::string file = t.id + ".pddl";
    write_atomic(project.layout.tasks() / file, pddl::print_problem(t.problem));
    index.push_back({{"id", t.id}, {"instruction", t.instruction}, {"problem", file}});
  }
  write_atomic(project.layout.tasks() / "tasks.json", index.dump(2) + "\n");
}

}  // namespace llmpddl::workspace
