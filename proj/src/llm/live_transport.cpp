#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "llmpddl/llm/transport.hpp"

namespace llmpddl::llm {

using nlohmann::json;

LiveTransport::LiveTransport(LiveConfig config) : config_(std::move(config)) {}

std::string LiveTransport::complete(const std::vector<Message>& messages) {
  std::lock_guard lock(mutex_);
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) throw TransportError("environment variable " + config_.api_key_env + " is not set");

  // Split "https://host[:port]/prefix" into the client origin and path prefix.
  std::string endpoint = config_.endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) throw TransportError("endpoint must start with http:// or https://");
  auto slash = endpoint.find('/', scheme + 3);
  std::string origin = slash == std::string::npos ? endpoint : endpoint.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : endpoint.substr(slash);

  json body = {{"model", config_.model}, {"temperature", config_.temperature}, {"messages", json::array()}};
  for (const auto& m : messages) body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});

  httplib::Client client(origin);
  auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_bearer_token_auth(key);

  std::string last_error;
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << attempt));
    auto res = client.Post(prefix + "/chat/completions", body.dump(), "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) throw TransportError("authentication rejected by endpoint");
    if (res->status == 429 || res->status >= 500) {
      last_error = "endpoint returned status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("endpoint returned status " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      auto reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw TransportError(std::string("malformed completion response: ") + e.what());
    }
  }
  throw TransportError(last_error);
}

}  // namespace llmpddl::llm
