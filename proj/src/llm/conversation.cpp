#include "llmpddl/llm/conversation.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace llmpddl::llm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

Role parse_role(const std::string& text) {
  if (text == "system") return Role::System;
  if (text == "user") return Role::User;
  if (text == "assistant") return Role::Assistant;
  throw std::invalid_argument("unknown role '" + text + "'");
}

Message& Conversation::add(Role role, std::string content, std::string timestamp) {
  messages.push_back({role, std::move(content), std::move(timestamp)});
  return messages.back();
}

std::string Conversation::last_content(Role role) const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == role) return it->content;
  }
  return {};
}

CorruptLog::CorruptLog(const fs::path& file, std::size_t line, const std::string& why)
    : std::runtime_error(file.string() + ":" + std::to_string(line) + ": corrupt conversation log: " + why),
      line_(line) {}

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ConversationStore::ConversationStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path ConversationStore::path(const std::string& id) const { return dir_ / (id + ".jsonl"); }

bool ConversationStore::exists(const std::string& id) const { return fs::exists(path(id)); }

void ConversationStore::persist(const Conversation& c) const {
  if (c.id.empty() || c.id.find('/') != std::string::npos || c.id.front() == '.') {
    throw std::invalid_argument("invalid conversation id '" + c.id + "'");
  }
  fs::create_directories(dir_);
  std::size_t stored = 0;
  if (exists(c.id)) {
    Conversation on_disk = load(c.id);
    if (on_disk.messages.size() > c.messages.size() ||
        !std::equal(on_disk.messages.begin(), on_disk.messages.end(), c.messages.begin())) {
      throw std::logic_error("conversation '" + c.id + "' diverges from its log; logs are append-only");
    }
    stored = on_disk.messages.size();
  }
  std::ofstream out(path(c.id), std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path(c.id).string());
  if (fs::file_size(path(c.id)) == 0) {
    out << json{{"id", c.id}, {"tags", c.tags}}.dump() << '\n';
  }
  for (std::size_t i = stored; i < c.messages.size(); ++i) {
    const auto& m = c.messages[i];
    out << json{{"role", to_string(m.role)}, {"content", m.content}, {"timestamp", m.timestamp}}.dump() << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path(c.id).string());
}

Conversation ConversationStore::load(const std::string& id) const {
  fs::path file = path(id);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("no conversation '" + id + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.empty()) throw CorruptLog(file, 1, "empty log");
  if (text.back() != '\n') {
    auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
    throw CorruptLog(file, lines, "truncated final line");
  }
  Conversation c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw CorruptLog(file, line_no, e.what());
    }
    try {
      if (line_no == 1) {
        c.id = j.at("id").get<std::string>();
        c.tags = j.value("tags", std::vector<std::string>{});
      } else {
        c.messages.push_back({parse_role(j.at("role").get<std::string>()), j.at("content").get<std::string>(),
                              j.value("timestamp", std::string())});
      }
    } catch (const std::exception& e) {
      throw CorruptLog(file, line_no, e.what());
    }
  }
  return c;
}

std::vector<std::string> ConversationStore::list() const {
  std::vector<std::string> out;
  if (!fs::is_directory(dir_)) return out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() == ".jsonl") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace llmpddl::llm
