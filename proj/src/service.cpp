#include "haunted/service.hpp"

#include <algorithm>
#include <iomanip>
#include <random>
#include <sstream>

#include "haunted/analyzer.hpp"

namespace haunted {

using nlohmann::json;

AppendOnlyStore::AppendOnlyStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw std::runtime_error("cannot open session store " + path_.string());
}

void AppendOnlyStore::append(const json& record) {
  const std::string line = record.dump() + "\n";
  std::lock_guard lock(mutex_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) throw std::runtime_error("write to session store failed");
}

std::vector<json> AppendOnlyStore::load() const {
  std::vector<json> out;
  std::ifstream in(path_, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // torn tail from a crash
      throw std::runtime_error("corrupt record in " + path_.string());
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::string new_session_id() {
  std::random_device rd;
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) out << std::hex << std::setw(8) << std::setfill('0') << rd();
  return out.str();
}

struct SessionService::Session {
  Session(const Engine& engine, InstructionVariant v, const MessageCatalog& catalog)
      : variant(v), recorder(engine, v, catalog) {}

  std::string id;
  std::int64_t created_at = 0;  // unix seconds
  InstructionVariant variant;
  std::string locale;
  json meta = json::object();
  GameRecorder recorder;
  std::mutex mutex;
};

namespace {

std::int64_t unix_seconds(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

ApiResponse error(int status, std::string message) {
  return {status, json{{"error", std::move(message)}}};
}

}  // namespace

SessionService::SessionService(ServiceConfig config)
    : config_(std::move(config)), engine_(Scenario::canonical()), store_(config_.store_path) {
  if (!config_.catalogs.contains(config_.default_locale)) {
    throw std::invalid_argument("no catalog for default locale " + config_.default_locale);
  }
  restore();
}

SessionService::~SessionService() = default;

void SessionService::restore() {
  for (const json& rec : store_.load()) {
    const std::string type = rec.at("type").get<std::string>();
    const std::string id = rec.at("session_id").get<std::string>();
    if (type == "session") {
      const auto variant = parse_variant(rec.at("variant").get<std::string>());
      const std::string locale = rec.at("locale").get<std::string>();
      auto s = std::make_shared<Session>(engine_, variant, config_.catalogs.at(locale));
      s->id = id;
      s->created_at = rec.at("created_at").get<std::int64_t>();
      s->locale = locale;
      s->meta = rec.value("meta", json::object());
      sessions_[id] = std::move(s);
    } else if (type == "move") {
      auto it = sessions_.find(id);
      if (it == sessions_.end()) throw std::runtime_error("move for unknown session " + id);
      const MoveRecord stored = rec.at("record").get<MoveRecord>();
      const MoveRecord& replayed = it->second->recorder.play(stored.command);
      if (replayed.index != stored.index || replayed.player_after != stored.player_after ||
          replayed.clue_ids != stored.clue_ids) {
        throw std::runtime_error("replay of session " + id + " diverges at move " +
                                 std::to_string(stored.index));
      }
      if (rec.contains("status") && rec["status"] != to_string(it->second->recorder.state().status)) {
        throw std::runtime_error("replay of session " + id + " ends in a different status");
      }
    }
  }
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string SessionService::status_of(const Session& s) const {
  const Status st = s.recorder.state().status;
  if (st == Status::InProgress &&
      unix_seconds(config_.clock()) - s.created_at >= config_.session_ttl.count()) {
    return "incomplete";
  }
  return to_string(st);
}

Transcript SessionService::transcript_of(const Session& s) const {
  Transcript t = s.recorder.transcript(s.id, AgentInfo{AgentKind::Human, std::nullopt});
  if (status_of(s) == "incomplete") t.outcome.status = OutcomeStatus::Incomplete;
  t.outcome.subobjectives = detect_subobjectives(t);
  return t;
}

ApiResponse SessionService::create_session(const json& request) {
  if (!request.is_object()) return error(400, "request body must be a JSON object");
  InstructionVariant variant = InstructionVariant::Original;
  std::string locale = config_.default_locale;
  try {
    if (request.contains("variant")) variant = parse_variant(request.at("variant").get<std::string>());
    if (request.contains("locale")) locale = request.at("locale").get<std::string>();
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
  if (!config_.catalogs.contains(locale)) return error(400, "unknown locale: " + locale);
  json meta = request.value("meta", json::object());
  if (!meta.is_object()) return error(400, "meta must be an object");

  const MessageCatalog& catalog = config_.catalogs.at(locale);
  auto s = std::make_shared<Session>(engine_, variant, catalog);
  s->id = new_session_id();
  s->created_at = unix_seconds(config_.clock());
  s->locale = locale;
  s->meta = std::move(meta);

  {
    std::unique_lock lock(sessions_mutex_);
    store_.append(json{{"type", "session"},
                       {"session_id", s->id},
                       {"created_at", s->created_at},
                       {"variant", to_string(variant)},
                       {"locale", locale},
                       {"meta", s->meta}});
    sessions_[s->id] = s;
  }
  return {200, json{{"session_id", s->id},
                    {"instructions_text", instructions(variant, catalog)},
                    {"move_limit", engine_.scenario().move_limit}}};
}

ApiResponse SessionService::post_move(const std::string& session_id, const json& request) {
  // Shared for the whole move so an export snapshot never sees half a move.
  std::shared_lock map_lock(sessions_mutex_);
  auto s = find(session_id);
  if (!s) return error(404, "unknown session");
  std::lock_guard lock(s->mutex);
  if (status_of(*s) != "in_progress") return error(409, "the game is over");

  if (!request.is_object() || !request.contains("input") || !request["input"].is_string()) {
    return error(422, "expected {\"input\": <move>}");
  }
  auto cmd = parse_command(request["input"].get<std::string>(), s->variant, ParseMode::Strict);
  if (!cmd) return error(422, "unrecognized input");

  const MoveRecord& rec = s->recorder.play(*cmd);
  const std::string status = to_string(s->recorder.state().status);
  store_.append(json{{"type", "move"}, {"session_id", s->id}, {"record", rec}, {"status", status}});
  return {200, json{{"feedback_text", rec.rendered_feedback},
                    {"status", status},
                    {"moves_used", s->recorder.state().moves_used}}};
}

ApiResponse SessionService::get_session(const std::string& session_id) {
  std::shared_lock map_lock(sessions_mutex_);
  auto s = find(session_id);
  if (!s) return error(404, "unknown session");
  std::lock_guard lock(s->mutex);
  json history = json::array();
  for (const MoveRecord& m : s->recorder.moves()) history.push_back(m.rendered_feedback);
  return {200, json{{"status", status_of(*s)},
                    {"moves_used", s->recorder.state().moves_used},
                    {"feedback_history", std::move(history)}}};
}

std::optional<std::string> SessionService::export_transcripts(std::string_view token) {
  if (config_.admin_token.empty() || token != config_.admin_token) return std::nullopt;
  std::unique_lock lock(sessions_mutex_);
  std::vector<std::shared_ptr<Session>> ordered;
  for (const auto& [id, s] : sessions_) ordered.push_back(s);
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return std::tie(a->created_at, a->id) < std::tie(b->created_at, b->id);
  });
  std::string out;
  for (const auto& s : ordered) {
    std::lock_guard session_lock(s->mutex);
    json line = transcript_of(*s);
    line["created_at"] = s->created_at;
    line["meta"] = s->meta;
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

}  // namespace haunted
