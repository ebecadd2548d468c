#include "haunted/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "haunted/analyzer.hpp"

namespace haunted {

using nlohmann::json;

namespace {

/// Uniform integer in [0, bound) by rejection, so streams are identical on
/// every standard library (std::uniform_int_distribution is not specified).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

int replies_so_far(std::span<const ChatMessage> history) {
  int n = 0;
  for (const auto& m : history) n += m.role == "assistant" ? 1 : 0;
  return n;
}

class ScriptAgent : public Agent {
 public:
  ScriptAgent(std::vector<std::string> script, AgentInfo info)
      : script_(std::move(script)), info_(std::move(info)) {}

  std::string reply(std::span<const ChatMessage> history) override {
    const auto k = static_cast<std::size_t>(replies_so_far(history));
    if (k >= script_.size()) throw ProtocolFailure("scripted agent has no move left");
    return script_[k];
  }

  AgentInfo info() const override { return info_; }

 private:
  std::vector<std::string> script_;
  AgentInfo info_;
};

class RandomAgent : public Agent {
 public:
  RandomAgent(std::uint64_t seed, InstructionVariant variant)
      : rng_(seed), form_(command_form(variant)) {}

  std::string reply(std::span<const ChatMessage>) override {
    if (form_ == CommandForm::Directions) {
      return format_direction(kAllDirections[uniform_below(rng_, kAllDirections.size())]);
    }
    return format_room(kAllRooms[uniform_below(rng_, kAllRooms.size())]);
  }

  AgentInfo info() const override { return {AgentKind::Scripted, std::string("random")}; }

 private:
  std::mt19937_64 rng_;
  CommandForm form_;
};

}  // namespace

Transcript run_trial(Agent& agent, const Scenario& scenario, const TrialPolicy& policy,
                     const MessageCatalog& catalog, std::string session_id) {
  const Engine engine(scenario);
  GameRecorder recorder(engine, policy.variant, catalog);
  std::vector<ChatMessage> dialogue;
  dialogue.push_back({"user", opening_prompt(policy.variant, catalog)});

  std::optional<Outcome> failure;
  int retries = 0;
  while (!recorder.finished()) {
    std::string text;
    try {
      text = agent.reply(dialogue);
    } catch (const TransportError& e) {
      failure = Outcome{OutcomeStatus::Invalid, recorder.state().moves_used, InvalidReason::Transport, e.what(), {}};
      break;
    } catch (const ProtocolFailure& e) {
      failure = Outcome{OutcomeStatus::Invalid, recorder.state().moves_used, InvalidReason::ProtocolFailure,
                        e.what(), {}};
      break;
    }
    dialogue.push_back({"assistant", text});

    auto cmd = parse_command(text, policy.variant, policy.parse_mode);
    if (!cmd) {
      if (retries >= policy.max_parse_retries) {
        failure = Outcome{OutcomeStatus::Invalid, recorder.state().moves_used, InvalidReason::ProtocolFailure,
                          "no move found after " + std::to_string(retries + 1) + " replies", {}};
        break;
      }
      ++retries;
      dialogue.push_back({"user", reprompt_text(policy.variant, catalog)});
      continue;
    }
    retries = 0;
    const MoveRecord& rec = recorder.play(*cmd);
    dialogue.push_back({"user", rec.rendered_feedback});
  }

  Transcript t = recorder.transcript(std::move(session_id), agent.info());
  if (failure) t.outcome = *failure;
  t.outcome.subobjectives = detect_subobjectives(t);
  t.raw_dialogue = std::move(dialogue);
  return t;
}

double BatchSummary::pass_rate() const {
  return valid() > 0 ? static_cast<double>(passes) / valid() : 0.0;
}

json to_json(const BatchSummary& s) {
  return json{{"requested", s.requested},
              {"finished", s.finished},
              {"valid", s.valid()},
              {"passes", s.passes},
              {"pass_rate", s.pass_rate()},
              {"invalid", s.invalid},
              {"invalid_protocol", s.invalid_protocol},
              {"invalid_transport", s.invalid_transport},
              {"subobjectives",
               {{"found_key", s.subobjectives[0]},
                {"returned_c1", s.subobjectives[1]},
                {"reached_a2", s.subobjectives[2]},
                {"avoided_a3", s.subobjectives[3]},
                {"escaped", s.subobjectives[4]}}},
              {"complete", s.complete}};
}

BatchResult run_batch(const AgentFactory& factory, const Scenario& scenario, const TrialPolicy& policy,
                      const BatchOptions& options, const MessageCatalog& catalog) {
  if (options.n < 1) throw std::invalid_argument("batch size must be at least 1");
  Scenario(scenario).validate();

  std::vector<std::optional<Transcript>> slots(static_cast<std::size_t>(options.n));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      if (options.stop.stop_requested()) return;
      const int i = next.fetch_add(1);
      if (i >= options.n) return;
      try {
        auto agent = factory(i);
        Transcript t = run_trial(*agent, scenario, policy, catalog,
                                 options.session_prefix + "-" + std::to_string(i + 1));
        if (options.on_transcript) options.on_transcript(t);
        slots[static_cast<std::size_t>(i)] = std::move(t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const int threads = std::max(1, std::min(options.parallelism, options.n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  BatchResult result;
  result.summary.requested = options.n;
  for (auto& slot : slots) {
    if (!slot) {
      result.summary.complete = false;
      continue;
    }
    const Transcript& t = *slot;
    BatchSummary& s = result.summary;
    ++s.finished;
    if (t.outcome.status == OutcomeStatus::Invalid) {
      ++s.invalid;
      if (t.outcome.invalid_reason == InvalidReason::Transport) ++s.invalid_transport;
      else ++s.invalid_protocol;
    } else {
      const SubObjectiveFlags f = t.outcome.subobjectives.value_or(detect_subobjectives(t));
      const std::array<bool, 5> flags = {f.found_key, f.returned_c1, f.reached_a2, f.avoided_a3, f.escaped};
      for (std::size_t k = 0; k < flags.size(); ++k) s.subobjectives[k] += flags[k] ? 1 : 0;
      s.passes += t.outcome.status == OutcomeStatus::Escaped ? 1 : 0;
    }
    result.transcripts.push_back(std::move(*slot));
  }
  return result;
}

std::vector<Command> reference_solution(CommandForm form) {
  using enum Direction;
  const std::vector<Direction> dirs = {Down, Up, Left, Left, Right, Right, Left, Left, Down, Up, Down, Down};
  std::vector<Command> out;
  Room at = rooms::C1;
  for (Direction d : dirs) {
    if (form == CommandForm::Directions) {
      out.emplace_back(d);
    } else {
      at = *step(at, d);
      out.emplace_back(at);
    }
  }
  return out;
}

std::unique_ptr<Agent> optimal_agent(InstructionVariant variant) {
  std::vector<std::string> script;
  for (const Command& c : reference_solution(command_form(variant))) script.push_back(format_command(c));
  return std::make_unique<ScriptAgent>(std::move(script), AgentInfo{AgentKind::Scripted, std::string("optimal")});
}

std::unique_ptr<Agent> random_agent(std::uint64_t seed, InstructionVariant variant) {
  return std::make_unique<RandomAgent>(seed, variant);
}

std::unique_ptr<Agent> replay_agent(const Transcript& transcript) {
  if (transcript.moves.empty()) throw std::invalid_argument("transcript has no recorded commands");
  std::vector<std::string> script;
  for (const MoveRecord& m : transcript.moves) script.push_back(format_command(m.command));
  return std::make_unique<ScriptAgent>(std::move(script), AgentInfo{AgentKind::Scripted, std::string("replay")});
}

std::uint64_t trial_seed(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void RequestPacer::wait() {
  std::unique_lock lock(mutex_);
  const auto now = std::chrono::steady_clock::now();
  if (last_) {
    const auto ready = *last_ + interval_;
    if (ready > now) {
      std::this_thread::sleep_until(ready);
    }
  }
  last_ = std::chrono::steady_clock::now();
}

std::string chat_request_body(const AgentConfig& config, std::span<const ChatMessage> history) {
  json messages = json::array();
  for (const auto& m : history) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body{{"model", config.model_id}, {"messages", std::move(messages)}};
  if (config.sampling.temperature) body["temperature"] = *config.sampling.temperature;
  if (config.sampling.top_p) body["top_p"] = *config.sampling.top_p;
  if (config.sampling.top_k) body["top_k"] = *config.sampling.top_k;
  return body.dump();
}

std::string chat_response_text(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw TransportError("response is not JSON");
  try {
    if (j.contains("choices") && !j["choices"].empty()) {
      const json& msg = j["choices"][0].at("message");
      return msg.at("content").get<std::string>();
    }
    if (j.contains("message") && j["message"].contains("content")) {
      return j["message"]["content"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
  throw TransportError("chat response has no assistant message");
}

namespace {

class ChatAgent : public Agent {
 public:
  ChatAgent(AgentConfig config, std::string credential, std::shared_ptr<HttpTransport> transport,
            std::shared_ptr<RequestPacer> pacer)
      : config_(std::move(config)),
        credential_(std::move(credential)),
        transport_(std::move(transport)),
        pacer_(std::move(pacer)) {}

  std::string reply(std::span<const ChatMessage> history) override {
    const std::string body = chat_request_body(config_, history);
    HttpHeaders headers{{"Content-Type", "application/json"}};
    if (!credential_.empty()) headers.emplace_back("Authorization", "Bearer " + credential_);

    auto backoff = config_.backoff_initial;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_transport_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      if (pacer_) pacer_->wait();
      HttpResponse r;
      try {
        r = transport_->post(config_.endpoint_url, body, headers, config_.timeout);
      } catch (const TransportError& e) {
        last_error = e.what();
        continue;
      }
      if (r.status >= 200 && r.status < 300) return chat_response_text(r.body);
      last_error = "HTTP " + std::to_string(r.status);
      if (r.status != 429 && r.status < 500) break;
    }
    throw TransportError("chat endpoint failed: " + last_error);
  }

  AgentInfo info() const override { return {AgentKind::Model, config_.model_id}; }

 private:
  AgentConfig config_;
  std::string credential_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<RequestPacer> pacer_;
};

}  // namespace

std::unique_ptr<Agent> chat_agent(const AgentConfig& config, std::shared_ptr<HttpTransport> transport,
                                  std::shared_ptr<RequestPacer> pacer) {
  std::string credential;
  if (!config.credential_env.empty()) {
    const char* value = std::getenv(config.credential_env.c_str());
    if (value == nullptr) {
      throw std::invalid_argument("credential variable " + config.credential_env + " is not set");
    }
    credential = value;
  }
  if (!transport) transport = make_http_transport();
  if (!pacer && config.request_pacing.count() > 0) pacer = std::make_shared<RequestPacer>(config.request_pacing);
  return std::make_unique<ChatAgent>(config, std::move(credential), std::move(transport), std::move(pacer));
}

}  // namespace haunted
