#include "haunted/transcript.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace haunted {

using nlohmann::json;

std::string to_string(AgentKind k) {
  switch (k) {
    case AgentKind::Human: return "human";
    case AgentKind::Scripted: return "scripted";
    case AgentKind::Model: return "model";
  }
  throw std::logic_error("bad agent kind");
}

std::string to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::Escaped: return "escaped";
    case OutcomeStatus::GhostDeath: return "ghost_death";
    case OutcomeStatus::OutOfMoves: return "out_of_moves";
    case OutcomeStatus::Incomplete: return "incomplete";
    case OutcomeStatus::Invalid: return "invalid";
  }
  throw std::logic_error("bad outcome status");
}

std::string to_string(InvalidReason r) {
  return r == InvalidReason::ProtocolFailure ? "protocol_failure" : "transport";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const E (&values)[N], const char* what) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw std::invalid_argument(std::string("unknown ") + what + ": " + std::string(text));
}

AgentKind parse_agent_kind(std::string_view t) {
  static constexpr AgentKind kinds[] = {AgentKind::Human, AgentKind::Scripted, AgentKind::Model};
  return parse_enum(t, kinds, "agent kind");
}

OutcomeStatus parse_outcome_status(std::string_view t) {
  static constexpr OutcomeStatus all[] = {OutcomeStatus::Escaped, OutcomeStatus::GhostDeath,
                                          OutcomeStatus::OutOfMoves, OutcomeStatus::Incomplete,
                                          OutcomeStatus::Invalid};
  return parse_enum(t, all, "outcome status");
}

InvalidReason parse_invalid_reason(std::string_view t) {
  static constexpr InvalidReason all[] = {InvalidReason::ProtocolFailure, InvalidReason::Transport};
  return parse_enum(t, all, "invalid reason");
}

}  // namespace

OutcomeStatus outcome_status_from(Status s) {
  switch (s) {
    case Status::InProgress: return OutcomeStatus::Incomplete;
    case Status::Escaped: return OutcomeStatus::Escaped;
    case Status::GhostDeath: return OutcomeStatus::GhostDeath;
    case Status::OutOfMoves: return OutcomeStatus::OutOfMoves;
  }
  throw std::logic_error("bad status");
}

std::string AgentInfo::label() const {
  std::string out = to_string(kind);
  if (model_id) out += ":" + *model_id;
  return out;
}

bool Transcript::has_clue(ClueId id) const {
  return std::any_of(moves.begin(), moves.end(), [id](const MoveRecord& m) {
    return std::find(m.clue_ids.begin(), m.clue_ids.end(), id) != m.clue_ids.end();
  });
}

void to_json(json& j, const SubObjectiveFlags& f) {
  j = json{{"found_key", f.found_key},
           {"returned_c1", f.returned_c1},
           {"reached_a2", f.reached_a2},
           {"avoided_a3", f.avoided_a3},
           {"escaped", f.escaped}};
}

void from_json(const json& j, SubObjectiveFlags& f) {
  j.at("found_key").get_to(f.found_key);
  j.at("returned_c1").get_to(f.returned_c1);
  j.at("reached_a2").get_to(f.reached_a2);
  j.at("avoided_a3").get_to(f.avoided_a3);
  j.at("escaped").get_to(f.escaped);
}

void to_json(json& j, const MoveRecord& m) {
  json clues = json::array();
  for (ClueId id : m.clue_ids) clues.push_back(to_string(id));
  j = json{{"index", m.index},
           {"command", format_command(m.command)},
           {"legal", m.legal},
           {"player_after", format_room(m.player_after)},
           {"ghost_after", format_room(m.ghost_after)},
           {"stage_after", m.stage_after},
           {"clue_ids", std::move(clues)},
           {"rendered_feedback", m.rendered_feedback}};
}

void from_json(const json& j, MoveRecord& m) {
  m.index = j.at("index").get<int>();
  m.command = parse_command_text(j.at("command").get<std::string>());
  m.legal = j.at("legal").get<bool>();
  m.player_after = parse_room(j.at("player_after").get<std::string>());
  m.ghost_after = parse_room(j.at("ghost_after").get<std::string>());
  m.stage_after = j.at("stage_after").get<std::string>();
  m.clue_ids.clear();
  for (const auto& c : j.at("clue_ids")) m.clue_ids.push_back(parse_clue_id(c.get<std::string>()));
  m.rendered_feedback = j.value("rendered_feedback", std::string{});
}

void to_json(json& j, const Transcript& t) {
  json agent{{"kind", to_string(t.agent.kind)}};
  if (t.agent.model_id) agent["model_id"] = *t.agent.model_id;

  json outcome{{"status", to_string(t.outcome.status)}, {"moves_used", t.outcome.moves_used}};
  if (t.outcome.invalid_reason) outcome["invalid_reason"] = to_string(*t.outcome.invalid_reason);
  if (t.outcome.detail) outcome["detail"] = *t.outcome.detail;
  if (t.outcome.subobjectives) outcome["subobjectives"] = *t.outcome.subobjectives;

  j = json{{"session_id", t.session_id},
           {"agent", std::move(agent)},
           {"variant", to_string(t.variant)},
           {"locale", t.locale},
           {"moves", t.moves},
           {"outcome", std::move(outcome)}};
  if (t.raw_dialogue) {
    json dialogue = json::array();
    for (const auto& m : *t.raw_dialogue) dialogue.push_back({{"role", m.role}, {"content", m.content}});
    j["raw_dialogue"] = std::move(dialogue);
  }
}

void from_json(const json& j, Transcript& t) {
  t.session_id = j.at("session_id").get<std::string>();
  const json& agent = j.at("agent");
  t.agent.kind = parse_agent_kind(agent.at("kind").get<std::string>());
  t.agent.model_id.reset();
  if (agent.contains("model_id")) t.agent.model_id = agent.at("model_id").get<std::string>();
  t.variant = parse_variant(j.at("variant").get<std::string>());
  t.locale = j.value("locale", std::string("en"));
  t.moves = j.at("moves").get<std::vector<MoveRecord>>();

  const json& o = j.at("outcome");
  t.outcome = Outcome{};
  t.outcome.status = parse_outcome_status(o.at("status").get<std::string>());
  t.outcome.moves_used = o.at("moves_used").get<int>();
  if (o.contains("invalid_reason")) {
    t.outcome.invalid_reason = parse_invalid_reason(o.at("invalid_reason").get<std::string>());
  }
  if (o.contains("detail")) t.outcome.detail = o.at("detail").get<std::string>();
  if (o.contains("subobjectives")) t.outcome.subobjectives = o.at("subobjectives").get<SubObjectiveFlags>();

  t.raw_dialogue.reset();
  if (j.contains("raw_dialogue")) {
    std::vector<ChatMessage> dialogue;
    for (const auto& m : j.at("raw_dialogue")) {
      dialogue.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
    t.raw_dialogue = std::move(dialogue);
  }
}

std::vector<Transcript> read_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Transcript> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<Transcript>());
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_transcripts(const std::filesystem::path& path, std::span<const Transcript> ts) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    for (const auto& t : ts) out << json(t).dump() << '\n';
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

GameRecorder::GameRecorder(const Engine& engine, InstructionVariant variant,
                           const MessageCatalog& catalog)
    : engine_(&engine), variant_(variant), catalog_(&catalog), state_(engine.new_game()) {}

const MoveRecord& GameRecorder::play(const Command& cmd) {
  const bool legal = engine_->is_legal(state_, cmd);
  StepResult r = engine_->apply(state_, cmd);
  state_ = r.state;
  MoveRecord rec;
  rec.index = static_cast<int>(moves_.size()) + 1;
  rec.command = cmd;
  rec.legal = legal;
  rec.player_after = state_.player;
  rec.ghost_after = state_.ghost;
  rec.stage_after = phase_label(state_);
  rec.clue_ids = r.feedback.clues;
  rec.rendered_feedback = render_feedback(r.feedback, *catalog_);
  moves_.push_back(std::move(rec));
  return moves_.back();
}

Transcript GameRecorder::transcript(std::string session_id, AgentInfo agent) const {
  Transcript t;
  t.session_id = std::move(session_id);
  t.agent = std::move(agent);
  t.variant = variant_;
  t.locale = catalog_->locale();
  t.moves = moves_;
  t.outcome.status = outcome_status_from(state_.status);
  t.outcome.moves_used = state_.moves_used;
  return t;
}

Transcript replay(const Scenario& scenario, std::span<const Command> commands,
                  const ReplayOptions& options) {
  Engine engine(scenario);
  GameRecorder rec(engine, options.variant);
  for (const Command& c : commands) {
    if (rec.finished()) {
      if (options.strict) {
        throw TerminalState("command " + std::to_string(rec.moves().size() + 1) +
                            " issued after the game ended");
      }
      break;
    }
    rec.play(c);
  }
  return rec.transcript(options.session_id, options.agent);
}

}  // namespace haunted
