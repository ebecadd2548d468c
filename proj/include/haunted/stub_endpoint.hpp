#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>

#include "haunted/messages.hpp"
#include "haunted/transcript.hpp"

namespace haunted {

/// A local chat-completion endpoint with scripted replies, for exercising the
/// HTTP agent without a real model. Serves POST /v1/chat/completions.
class StubChatServer {
 public:
  using ReplyFn = std::function<std::string(std::span<const ChatMessage>)>;

  explicit StubChatServer(ReplyFn reply);
  ~StubChatServer();
  StubChatServer(const StubChatServer&) = delete;
  StubChatServer& operator=(const StubChatServer&) = delete;

  /// Binds to host:port (port 0 picks a free one) and serves in the background.
  void start(const std::string& host = "127.0.0.1", int port = 0);
  /// Binds and serves on the calling thread until stop().
  void listen_blocking(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  std::string url() const;

  /// Statuses to answer with (one per request, in order) before replying normally.
  void queue_failures(std::deque<int> statuses);
  int requests() const;

  /// Replays the walkthrough: the k-th reply is the k-th move.
  static ReplyFn optimal_script(InstructionVariant variant);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace haunted
