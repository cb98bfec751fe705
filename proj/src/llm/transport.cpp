#include "llmpddl/llm/transport.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace llmpddl::llm {

namespace fs = std::filesystem;
using nlohmann::json;

CassetteMiss::CassetteMiss(std::string digest)
    : std::runtime_error("no cassette record for request digest " + digest), digest_(std::move(digest)) {}

std::string digest(const std::vector<Message>& messages) {
  std::string data;
  for (const auto& m : messages) {
    std::string role = to_string(m.role);
    data += std::to_string(role.size()) + ":" + role + std::to_string(m.content.size()) + ":" + m.content;
  }
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(out[i]);
  return hex.str();
}

ScriptedTransport::ScriptedTransport(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}

void ScriptedTransport::push(std::string reply) {
  std::lock_guard lock(mutex_);
  replies_.push_back(std::move(reply));
}

std::size_t ScriptedTransport::remaining() const {
  std::lock_guard lock(mutex_);
  return replies_.size();
}

std::string ScriptedTransport::complete(const std::vector<Message>&) {
  std::lock_guard lock(mutex_);
  if (replies_.empty()) throw ScriptExhausted();
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

std::vector<CassetteRecord> read_cassette(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read cassette " + file.string());
  std::vector<CassetteRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      out.push_back({j.at("digest").get<std::string>(), j.at("response").get<std::string>(),
                     j.value("prompt_head", std::string())});
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": bad cassette record: " + e.what());
    }
  }
  return out;
}

void append_cassette(const fs::path& file, const CassetteRecord& record) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::app | std::ios::binary);
  out << json{{"digest", record.digest}, {"prompt_head", record.prompt_head}, {"response", record.response}}.dump()
      << '\n';
  if (!out) throw std::runtime_error("cannot write cassette " + file.string());
}

ReplayTransport::ReplayTransport(const std::vector<fs::path>& cassettes) {
  for (const auto& file : cassettes) {
    for (auto& r : read_cassette(file)) records_[r.digest] = std::move(r.response);
  }
}

std::string ReplayTransport::complete(const std::vector<Message>& messages) {
  std::string key = digest(messages);
  auto it = records_.find(key);
  if (it == records_.end()) throw CassetteMiss(key);
  return it->second;
}

RecordingTransport::RecordingTransport(Transport& inner, fs::path cassette)
    : inner_(inner), cassette_(std::move(cassette)) {}

std::string RecordingTransport::complete(const std::vector<Message>& messages) {
  std::string reply = inner_.complete(messages);
  std::string head;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) {
      head = it->content.substr(0, 120);
      break;
    }
  }
  std::lock_guard lock(mutex_);
  append_cassette(cassette_, {digest(messages), reply, head});
  return reply;
}

const Message& complete(Conversation& c, Transport& transport) {
  if (c.messages.empty() || c.messages.back().role == Role::Assistant) {
    throw std::logic_error("conversation '" + c.id + "' has no pending request");
  }
  std::string reply = transport.complete(c.messages);
  return c.add(Role::Assistant, std::move(reply), utc_now());
}

}  // namespace llmpddl::llm
