#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "haunted/engine.hpp"
#include "haunted/messages.hpp"

namespace haunted {

enum class AgentKind { Human, Scripted, Model };

struct AgentInfo {
  AgentKind kind = AgentKind::Human;
  std::optional<std::string> model_id;

  /// "human", "scripted:optimal", "model:gpt-x", ...
  std::string label() const;
  friend bool operator==(const AgentInfo&, const AgentInfo&) = default;
};

enum class OutcomeStatus { Escaped, GhostDeath, OutOfMoves, Incomplete, Invalid };
enum class InvalidReason { ProtocolFailure, Transport };

std::string to_string(AgentKind k);
std::string to_string(OutcomeStatus s);
std::string to_string(InvalidReason r);
OutcomeStatus outcome_status_from(Status s);

/// The five scored milestones, in the order a successful game reaches them.
struct SubObjectiveFlags {
  bool found_key = false;
  bool returned_c1 = false;
  bool reached_a2 = false;
  bool avoided_a3 = false;
  bool escaped = false;

  friend bool operator==(const SubObjectiveFlags&, const SubObjectiveFlags&) = default;
};

struct Outcome {
  OutcomeStatus status = OutcomeStatus::Incomplete;
  int moves_used = 0;
  std::optional<InvalidReason> invalid_reason;
  std::optional<std::string> detail;
  std::optional<SubObjectiveFlags> subobjectives;

  bool terminal() const {
    return status == OutcomeStatus::Escaped || status == OutcomeStatus::GhostDeath ||
           status == OutcomeStatus::OutOfMoves;
  }
};

/// One processed command with its ground truth.
struct MoveRecord {
  int index = 0;  // 1-based
  Command command{Direction::Left};
  bool legal = false;
  Room player_after = rooms::C1;
  Room ghost_after = rooms::B2;
  std::string stage_after;
  std::vector<ClueId> clue_ids;
  std::string rendered_feedback;
};

struct ChatMessage {
  std::string role;  // "user" | "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct Transcript {
  std::string session_id;
  AgentInfo agent;
  InstructionVariant variant = InstructionVariant::Original;
  std::string locale = "en";
  std::vector<MoveRecord> moves;
  Outcome outcome;
  std::optional<std::vector<ChatMessage>> raw_dialogue;

  bool has_clue(ClueId id) const;
};

void to_json(nlohmann::json& j, const Transcript& t);
void from_json(const nlohmann::json& j, Transcript& t);
void to_json(nlohmann::json& j, const MoveRecord& m);
void from_json(const nlohmann::json& j, MoveRecord& m);
void to_json(nlohmann::json& j, const SubObjectiveFlags& f);
void from_json(const nlohmann::json& j, SubObjectiveFlags& f);

/// Reads a file holding one transcript JSON object per line.
std::vector<Transcript> read_transcripts(const std::filesystem::path& path);
/// Writes one transcript per line via a temporary file and rename.
void write_transcripts(const std::filesystem::path& path, std::span<const Transcript> ts);

/// Drives an Engine and accumulates MoveRecords as a game is played.
class GameRecorder {
 public:
  GameRecorder(const Engine& engine, InstructionVariant variant,
               const MessageCatalog& catalog = MessageCatalog::english());

  /// Applies one command; throws TerminalState after the game has ended.
  const MoveRecord& play(const Command& cmd);

  const GameState& state() const { return state_; }
  const std::vector<MoveRecord>& moves() const { return moves_; }
  bool finished() const { return state_.status != Status::InProgress; }

  Transcript transcript(std::string session_id, AgentInfo agent) const;

 private:
  const Engine* engine_;
  InstructionVariant variant_;
  const MessageCatalog* catalog_;
  GameState state_;
  std::vector<MoveRecord> moves_;
};

struct ReplayOptions {
  InstructionVariant variant = InstructionVariant::Original;
  /// Throw TerminalState on commands past the end instead of truncating.
  bool strict = false;
  std::string session_id = "replay";
  AgentInfo agent{AgentKind::Scripted, std::string("replay")};
};

Transcript replay(const Scenario& scenario, std::span<const Command> commands,
                  const ReplayOptions& options = {});

}  // namespace haunted
