#include "llmpddl/service/http.hpp"

#include "httplib.h"

namespace llmpddl::service {

struct HttpServer::Impl {
  explicit Impl(ApiService& a) : api(a) {}
  ApiService& api;
  httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(ApiService& api, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(api)) {
  auto& server = impl_->server;
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    reply(res, impl_->api.handle(req.method, req.path, req.body, query));
  };
  server.Get(R"(/v1/.*)", dispatch);
  server.Post(R"(/v1/.*)", dispatch);
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, error_response({"internal", what}));
  });
  if (static_dir) server.set_mount_point("/", static_dir->string());
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && req.path.rfind("/v1/", 0) != 0) {
      reply(res, error_response({"not-found", "no such file " + req.path}));
    }
  });
  // Long polls hold a worker for their whole timeout.
  server.new_task_queue = [] { return new httplib::ThreadPool(16); };
  server.set_read_timeout(70, 0);
  server.set_write_timeout(70, 0);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace llmpddl::service
