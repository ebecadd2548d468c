#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include "haunted/engine.hpp"
#include "haunted/messages.hpp"
#include "haunted/transcript.hpp"

namespace haunted {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by an agent that cannot produce a move at all (e.g. a replay agent
/// that ran out of recorded commands).
class ProtocolFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Anything that can play: receives the whole dialogue so far (the opening
/// prompt, then alternating replies and feedback) and returns its next reply.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string reply(std::span<const ChatMessage> history) = 0;
  virtual AgentInfo info() const = 0;
};

enum class ParseFailurePolicy { AbortInvalid };

struct TrialPolicy {
  InstructionVariant variant = InstructionVariant::Original;
  std::string locale = "en";
  ParseMode parse_mode = ParseMode::LastToken;
  /// Clarification prompts allowed per move before the trial is abandoned.
  int max_parse_retries = 2;
  ParseFailurePolicy on_parse_failure = ParseFailurePolicy::AbortInvalid;
};

/// Plays one game through the dialogue protocol. Transport and protocol
/// failures end the trial as OutcomeStatus::Invalid; they never throw.
Transcript run_trial(Agent& agent, const Scenario& scenario, const TrialPolicy& policy,
                     const MessageCatalog& catalog = MessageCatalog::english(),
                     std::string session_id = "trial-1");

struct BatchSummary {
  int requested = 0;
  int finished = 0;  // trials that ran to any outcome
  int passes = 0;
  int invalid = 0;
  int invalid_protocol = 0;
  int invalid_transport = 0;
  std::array<int, 5> subobjectives{};  // found_key .. escaped
  /// False when the batch was stopped before every trial ran.
  bool complete = true;

  /// Passes over valid trials (invalid ones are excluded from the denominator).
  double pass_rate() const;
  int valid() const { return finished - invalid; }
};

nlohmann::json to_json(const BatchSummary& s);

struct BatchResult {
  std::vector<Transcript> transcripts;  // ordered by trial index
  BatchSummary summary;
};

/// Creates a fresh agent for trial `index` (0-based).
using AgentFactory = std::function<std::unique_ptr<Agent>(int index)>;

struct BatchOptions {
  int n = 20;
  int parallelism = 1;
  std::string session_prefix = "trial";
  /// Called once per finished trial, possibly from several threads at once.
  std::function<void(const Transcript&)> on_transcript;
  std::stop_token stop;
};

BatchResult run_batch(const AgentFactory& factory, const Scenario& scenario, const TrialPolicy& policy,
                      const BatchOptions& options = {},
                      const MessageCatalog& catalog = MessageCatalog::english());

/// The 12-move walkthrough: down, up, left, left, right, right, left, left,
/// down, up, down, down (or the matching room labels).
std::vector<Command> reference_solution(CommandForm form = CommandForm::Directions);

std::unique_ptr<Agent> optimal_agent(InstructionVariant variant = InstructionVariant::Original);
std::unique_ptr<Agent> random_agent(std::uint64_t seed,
                                    InstructionVariant variant = InstructionVariant::Original);
/// Throws std::invalid_argument if the transcript has no moves.
std::unique_ptr<Agent> replay_agent(const Transcript& transcript);

/// Seed for trial `index` of a batch seeded with `seed`.
std::uint64_t trial_seed(std::uint64_t seed, int index);

// --- chat-completion endpoint adapter ---------------------------------------

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Minimal POST transport; throws TransportError when no response arrives.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body, const HttpHeaders& headers,
                            std::chrono::milliseconds timeout) = 0;
};

std::shared_ptr<HttpTransport> make_http_transport();

/// Enforces a minimum interval between requests; shareable across agents.
class RequestPacer {
 public:
  explicit RequestPacer(std::chrono::milliseconds interval) : interval_(interval) {}
  void wait();

 private:
  std::mutex mutex_;
  std::chrono::milliseconds interval_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

struct SamplingOverrides {
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> top_k;
};

struct AgentConfig {
  std::string endpoint_url;
  std::string model_id;
  /// Environment variable holding the bearer credential; empty means none.
  std::string credential_env = "HAUNTED_API_KEY";
  SamplingOverrides sampling;  // unset: provider defaults
  std::chrono::milliseconds timeout{60000};
  int max_parse_retries = 2;
  std::chrono::milliseconds request_pacing{1000};
  int max_transport_retries = 3;
  std::chrono::milliseconds backoff_initial{1000};
};

/// Builds the JSON request body for a dialogue.
std::string chat_request_body(const AgentConfig& config, std::span<const ChatMessage> history);
/// Extracts the assistant text from a chat-completion response body.
/// Throws TransportError on an unrecognized shape.
std::string chat_response_text(const std::string& body);

/// Agent backed by a chat-completion HTTP endpoint. Throws
/// std::invalid_argument if the credential variable is named but unset.
std::unique_ptr<Agent> chat_agent(const AgentConfig& config, std::shared_ptr<HttpTransport> transport = nullptr,
                                  std::shared_ptr<RequestPacer> pacer = nullptr);

}  // namespace haunted
