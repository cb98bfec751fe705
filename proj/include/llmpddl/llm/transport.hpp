#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "llmpddl/llm/conversation.hpp"

namespace llmpddl::llm {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No cassette record for the outbound messages: code and fixtures drifted.
class CassetteMiss : public std::runtime_error {
 public:
  explicit CassetteMiss(std::string digest);
  const std::string& digest() const { return digest_; }

 private:
  std::string digest_;
};

class ScriptExhausted : public std::runtime_error {
 public:
  ScriptExhausted() : std::runtime_error("scripted transport has no replies left") {}
};

// Hex SHA-256 of the role/content sequence (timestamps excluded).
std::string digest(const std::vector<Message>& messages);

class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const std::vector<Message>& messages) = 0;
  virtual std::string mode() const = 0;
};

class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::vector<std::string> replies = {});
  void push(std::string reply);
  std::size_t remaining() const;
  std::string complete(const std::vector<Message>& messages) override;
  std::string mode() const override { return "scripted"; }

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> replies_;
};

struct CassetteRecord {
  std::string digest;
  std::string response;
  std::string prompt_head;  // start of the last user message, for humans
};

// Cassettes: one JSON record per line.
std::vector<CassetteRecord> read_cassette(const std::filesystem::path& file);
void append_cassette(const std::filesystem::path& file, const CassetteRecord& record);

class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(const std::vector<std::filesystem::path>& cassettes);
  std::string complete(const std::vector<Message>& messages) override;
  std::string mode() const override { return "replay"; }
  std::size_t size() const { return records_.size(); }

 private:
  std::map<std::string, std::string> records_;
};

// Forwards to another transport and appends every exchange to a cassette.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& inner, std::filesystem::path cassette);
  std::string complete(const std::vector<Message>& messages) override;
  std::string mode() const override { return inner_.mode(); }

 private:
  Transport& inner_;
  std::filesystem::path cassette_;
  std::mutex mutex_;
};

struct LiveConfig {
  std::string endpoint;  // base URL, e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_attempts = 3;
  double timeout_seconds = 120;
};

// OpenAI-style chat completion over HTTP(S). The key is read from the
// environment at call time and never stored.
class LiveTransport : public Transport {
 public:
  explicit LiveTransport(LiveConfig config);
  std::string complete(const std::vector<Message>& messages) override;
  std::string mode() const override { return "live"; }

 private:
  LiveConfig config_;
  std::mutex mutex_;
};

// Appends the assistant reply to `c` and returns it. The last message must
// not be an assistant message.
const Message& complete(Conversation& c, Transport& transport);

}  // namespace llmpddl::llm
