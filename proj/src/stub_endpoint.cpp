#include "haunted/stub_endpoint.hpp"

#include <httplib.h>

#include "haunted/harness.hpp"

namespace haunted {

using nlohmann::json;

struct StubChatServer::Impl {
  httplib::Server server;
  ReplyFn reply;
  mutable std::mutex mutex;
  std::deque<int> failures;
  int requests = 0;
};

StubChatServer::StubChatServer(ReplyFn reply) : impl_(std::make_unique<Impl>()) {
  impl_->reply = std::move(reply);
  impl_->server.Post("/v1/chat/completions", [impl = impl_.get()](const httplib::Request& req,
                                                                  httplib::Response& res) {
    {
      std::lock_guard lock(impl->mutex);
      ++impl->requests;
      if (!impl->failures.empty()) {
        res.status = impl->failures.front();
        impl->failures.pop_front();
        res.set_content(R"({"error":"scripted failure"})", "application/json");
        return;
      }
    }
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("messages")) {
      res.status = 400;
      return;
    }
    std::vector<ChatMessage> history;
    for (const auto& m : body["messages"]) {
      history.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
    const std::string text = impl->reply(history);
    json out{{"object", "chat.completion"},
             {"model", body.value("model", std::string("stub"))},
             {"choices", json::array({{{"index", 0},
                                       {"message", {{"role", "assistant"}, {"content", text}}},
                                       {"finish_reason", "stop"}}})}};
    res.set_content(out.dump(), "application/json");
  });
}

StubChatServer::~StubChatServer() { stop(); }

void StubChatServer::start(const std::string& host, int port) {
  port_ = port == 0 ? impl_->server.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->server.bind_to_port(host, port)) port_ = -1;
  if (port_ <= 0) throw std::runtime_error("stub endpoint could not bind " + host);
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void StubChatServer::listen_blocking(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw std::runtime_error("stub endpoint could not listen");
}

void StubChatServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

void StubChatServer::queue_failures(std::deque<int> statuses) {
  std::lock_guard lock(impl_->mutex);
  impl_->failures = std::move(statuses);
}

int StubChatServer::requests() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->requests;
}

StubChatServer::ReplyFn StubChatServer::optimal_script(InstructionVariant variant) {
  auto agent = std::shared_ptr<Agent>(optimal_agent(variant));
  return [agent](std::span<const ChatMessage> history) {
    try {
      return agent->reply(history);
    } catch (const ProtocolFailure&) {
      return std::string("I have no further moves.");
    }
  };
}

}  // namespace haunted
