#include "llmpddl/workspace/transport.hpp"

namespace llmpddl::workspace {

namespace {

class RecordingLive : public llm::Transport {
 public:
  RecordingLive(llm::LiveConfig config, fs::path cassette)
      : live_(std::move(config)), recording_(live_, std::move(cassette)) {}
  std::string complete(const std::vector<llm::Message>& messages) override { return recording_.complete(messages); }
  std::string mode() const override { return "record"; }

 private:
  llm::LiveTransport live_;
  llm::RecordingTransport recording_;
};

}  // namespace

std::unique_ptr<llm::Transport> make_transport(const Project& project) {
  const auto& t = project.config.transport;
  std::vector<fs::path> cassettes;
  for (const auto& c : t.cassettes) cassettes.push_back(project.layout.root / c);
  llm::LiveConfig live{t.endpoint, t.model, t.api_key_env};
  if (t.mode == "scripted") {
    std::vector<std::string> replies;
    for (const auto& c : cassettes) {
      for (const auto& r : llm::read_cassette(c)) replies.push_back(r.response);
    }
    return std::make_unique<llm::ScriptedTransport>(std::move(replies));
  }
  if (t.mode == "replay") return std::make_unique<llm::ReplayTransport>(cassettes);
  if (t.mode == "live") return std::make_unique<llm::LiveTransport>(live);
  if (t.mode == "record") {
    if (cassettes.empty()) throw ConfigError("record mode needs a cassette to write");
    return std::make_unique<RecordingLive>(live, cassettes.front());
  }
  throw ConfigError("unknown transport mode '" + t.mode + "'");
}

}  // namespace llmpddl::workspace
