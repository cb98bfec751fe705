#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "llmpddl/service/api.hpp"

namespace llmpddl::service {

// HTTP front end for ApiService: the /v1 routes plus an optional static
// directory mounted at "/".
class HttpServer {
 public:
  explicit HttpServer(ApiService& api, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  // Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace llmpddl::service
