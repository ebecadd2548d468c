#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "haunted/clue.hpp"
#include "haunted/geometry.hpp"

namespace haunted {

enum class Phase { Searching, Returning, Endgame };

enum class Status { InProgress, Escaped, GhostDeath, OutOfMoves };

std::string to_string(Status s);
Status parse_status(std::string_view text);

/// Which movement vocabulary a game accepts.
enum class CommandForm { Directions, Coordinates };

/// A player move: either a direction or an explicit target room.
class Command {
 public:
  explicit Command(Direction d) : value_(d) {}
  explicit Command(Room target) : value_(target) {}

  bool is_direction() const { return std::holds_alternative<Direction>(value_); }
  Direction direction() const { return std::get<Direction>(value_); }
  Room target() const { return std::get<Room>(value_); }
  CommandForm form() const {
    return is_direction() ? CommandForm::Directions : CommandForm::Coordinates;
  }

  friend bool operator==(const Command&, const Command&) = default;

 private:
  std::variant<Direction, Room> value_;
};

/// "left" / "A2" style text for a command.
std::string format_command(const Command& c);
/// Inverse of format_command; throws ParseError.
Command parse_command_text(std::string_view text);

/// Condition on a single legal move (room left, room entered) that fires a
/// ghost event. Unset fields match anything.
struct EventTrigger {
  std::optional<Room> leaving;
  std::optional<Room> entering;
  std::optional<Room> not_entering;

  bool matches(Room from, Room to) const;
};

struct GhostEvent {
  EventTrigger trigger;
  Room ghost_from;
  Room ghost_to;
  ClueId clue;
};

enum class RelocationRule { MaxDistanceFromCurrent };

class InvalidScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TerminalState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Scenario {
  Room start = rooms::C1;
  Room key_room = rooms::A1;
  Room ghost_room = rooms::B2;
  Room door_room = rooms::C1;
  int move_limit = 20;
  RelocationRule relocation = RelocationRule::MaxDistanceFromCurrent;
  /// Fired strictly in order, at most once each, after the door relocates.
  std::vector<GhostEvent> events;

  /// Start C1, key A1, ghost B2, 20 moves, three-event ghost script.
  static Scenario canonical();

  /// Throws InvalidScenario when the layout or event script is inconsistent.
  void validate() const;
};

struct GameState {
  Room player = rooms::C1;
  Room ghost = rooms::B2;
  Room door = rooms::C1;
  bool has_key = false;
  Phase phase = Phase::Searching;
  /// Number of ghost events fired; only meaningful in Phase::Endgame.
  int stage = 0;
  int moves_used = 0;
  Status status = Status::InProgress;

  friend bool operator==(const GameState&, const GameState&) = default;
};

/// Short label used in transcripts: "searching", "returning", "endgame-2".
std::string phase_label(const GameState& s);

struct Feedback {
  std::vector<ClueId> clues;
  /// Set when this move ended the game.
  std::optional<Status> terminal;

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

struct StepResult {
  GameState state;
  Feedback feedback;
};

/// The game's transition function for one scenario. Stateless and pure; a
/// single Engine can be shared freely between threads.
class Engine {
 public:
  explicit Engine(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }

  GameState new_game() const;

  /// Throws TerminalState if `state` has already ended.
  StepResult apply(const GameState& state, const Command& cmd) const;

  bool is_legal(const GameState& state, const Command& cmd) const;

  std::vector<Command> legal_commands(const GameState& state, CommandForm form) const;

 private:
  std::optional<Room> destination(Room player, const Command& cmd) const;

  Scenario scenario_;
};

}  // namespace haunted
