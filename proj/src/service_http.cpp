#include <httplib.h>

#include "haunted/service.hpp"

namespace haunted {

using nlohmann::json;

struct HttpService::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body, nullptr, false);
}

}  // namespace

HttpService::HttpService(SessionService& service, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    json body = body_of(req);
    if (body.is_discarded()) return send(res, {400, json{{"error", "invalid JSON"}}});
    send(res, service.create_session(body));
  });

  srv.Post(R"(/sessions/([0-9a-f]+)/moves)", [&service](const httplib::Request& req, httplib::Response& res) {
    json body = body_of(req);
    if (body.is_discarded()) return send(res, {422, json{{"error", "invalid JSON"}}});
    send(res, service.post_move(req.matches[1], body));
  });

  srv.Get(R"(/sessions/([0-9a-f]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_session(req.matches[1]));
  });

  srv.Get("/export", [&service](const httplib::Request& req, httplib::Response& res) {
    auto stream = service.export_transcripts(req.get_param_value("token"));
    if (!stream) return send(res, {401, json{{"error", "bad token"}}});
    res.status = 200;
    res.set_content(*stream, "application/x-ndjson");
  });

  if (!static_dir.empty()) srv.set_mount_point("/", static_dir.string());
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void HttpService::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace haunted
