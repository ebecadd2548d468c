#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include <json.hpp>

#include "haunted/engine.hpp"
#include "haunted/messages.hpp"
#include "haunted/transcript.hpp"

namespace haunted {

/// Append-only newline-delimited JSON log. Each append is one complete line
/// written and flushed under a lock.
class AppendOnlyStore {
 public:
  explicit AppendOnlyStore(std::filesystem::path path);

  void append(const nlohmann::json& record);
  /// Every complete record in the file; a torn final line is ignored.
  std::vector<nlohmann::json> load() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

struct ServiceConfig {
  std::filesystem::path store_path = "haunted-sessions.jsonl";
  /// Export is refused for every token while this is empty.
  std::string admin_token;
  std::string default_locale = "en";
  std::chrono::seconds session_ttl = std::chrono::hours(24);
  std::function<std::chrono::system_clock::time_point()> clock = [] {
    return std::chrono::system_clock::now();
  };
  CatalogSet catalogs = CatalogSet::with_defaults();
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Session bookkeeping behind the HTTP API. Thread-safe: requests for one
/// session are serialized, different sessions proceed in parallel.
class SessionService {
 public:
  /// Opens the store and restores every persisted session by replaying it.
  explicit SessionService(ServiceConfig config);
  ~SessionService();

  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse post_move(const std::string& session_id, const nlohmann::json& request);
  ApiResponse get_session(const std::string& session_id);

  /// Full transcripts, one JSON object per line, or nullopt for a bad token.
  std::optional<std::string> export_transcripts(std::string_view token);

  std::size_t session_count() const;
  const ServiceConfig& config() const { return config_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  /// "in_progress" etc.; sessions past their TTL report "incomplete".
  std::string status_of(const Session& s) const;
  Transcript transcript_of(const Session& s) const;
  void restore();

  ServiceConfig config_;
  Engine engine_;
  AppendOnlyStore store_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// HTTP front end for a SessionService.
class HttpService {
 public:
  explicit HttpService(SessionService& service, std::filesystem::path static_dir = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds (port 0 = any free port) and serves on a background thread.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

std::string new_session_id();

}  // namespace haunted
