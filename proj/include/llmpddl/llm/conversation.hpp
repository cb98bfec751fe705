#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace llmpddl::llm {

enum class Role { System, User, Assistant };

std::string to_string(Role role);
Role parse_role(const std::string& text);

struct Message {
  Role role = Role::User;
  std::string content;
  std::string timestamp;  // ISO 8601 UTC; not part of the cassette digest

  friend bool operator==(const Message&, const Message&) = default;
};

struct Conversation {
  std::string id;
  std::vector<std::string> tags;
  std::vector<Message> messages;

  Message& add(Role role, std::string content, std::string timestamp = {});
  const Message* last() const { return messages.empty() ? nullptr : &messages.back(); }
  // Content of the last message with `role`; empty when none.
  std::string last_content(Role role) const;

  friend bool operator==(const Conversation&, const Conversation&) = default;
};

class CorruptLog : public std::runtime_error {
 public:
  CorruptLog(const std::filesystem::path& file, std::size_t line, const std::string& why);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string utc_now();

// One JSON object per line: a header with id and tags, then one line per
// message. Files are only ever appended to.
class ConversationStore {
 public:
  explicit ConversationStore(std::filesystem::path dir);

  std::filesystem::path path(const std::string& id) const;
  bool exists(const std::string& id) const;

  // Appends the messages of `c` not yet on disk. The stored log must be a
  // prefix of `c`; anything else is refused rather than rewritten.
  void persist(const Conversation& c) const;
  Conversation load(const std::string& id) const;
  std::vector<std::string> list() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace llmpddl::llm
