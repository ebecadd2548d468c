#include "haunted/engine.hpp"

#include <algorithm>
#include <cctype>

namespace haunted {

std::string to_string(Status s) {
  switch (s) {
    case Status::InProgress: return "in_progress";
    case Status::Escaped: return "escaped";
    case Status::GhostDeath: return "ghost_death";
    case Status::OutOfMoves: return "out_of_moves";
  }
  throw std::logic_error("bad status");
}

Status parse_status(std::string_view text) {
  for (Status s : {Status::InProgress, Status::Escaped, Status::GhostDeath, Status::OutOfMoves}) {
    if (to_string(s) == text) return s;
  }
  throw std::invalid_argument("unknown status: " + std::string(text));
}

std::string format_command(const Command& c) {
  return c.is_direction() ? format_direction(c.direction()) : format_room(c.target());
}

Command parse_command_text(std::string_view text) {
  if (text.size() == 2 && std::isalpha(static_cast<unsigned char>(text[0])) &&
      std::isdigit(static_cast<unsigned char>(text[1])))
    return Command(parse_room(text));
  return Command(parse_direction(text));
}

bool EventTrigger::matches(Room from, Room to) const {
  if (leaving && *leaving != from) return false;
  if (entering && *entering != to) return false;
  if (not_entering && *not_entering == to) return false;
  return true;
}

Scenario Scenario::canonical() {
  using namespace rooms;
  Scenario s;
  s.start = C1;
  s.key_room = A1;
  s.ghost_room = B2;
  s.door_room = C1;
  s.move_limit = 20;
  s.events = {
      // Any legal move out of the start room once the door has moved.
      GhostEvent{EventTrigger{C1, std::nullopt, std::nullopt}, B2, B3, ClueId::C7},
      GhostEvent{EventTrigger{std::nullopt, A2, std::nullopt}, B3, A3, ClueId::C8},
      // Leaving A2 for A1 or B2; stepping into A3 meets the ghost first.
      GhostEvent{EventTrigger{A2, std::nullopt, A3}, A3, C3, ClueId::C9},
  };
  return s;
}

void Scenario::validate() const {
  if (start != door_room) throw InvalidScenario("the exit door must be in the start room");
  if (key_room == start) throw InvalidScenario("the key cannot be in the start room");
  if (ghost_room == start || ghost_room == key_room) {
    throw InvalidScenario("the ghost must not share a room with the start or the key");
  }
  if (move_limit < 1) throw InvalidScenario("move limit must be positive");
  try {
    (void)max_distance_room(door_room);
  } catch (const AmbiguousTarget& e) {
    throw InvalidScenario(std::string("door relocation is ambiguous: ") + e.what());
  }
  Room ghost = ghost_room;
  for (const GhostEvent& ev : events) {
    if (ev.ghost_from != ghost) throw InvalidScenario("ghost event script does not chain");
    ghost = ev.ghost_to;
  }
}

std::string phase_label(const GameState& s) {
  switch (s.phase) {
    case Phase::Searching: return "searching";
    case Phase::Returning: return "returning";
    case Phase::Endgame: return "endgame-" + std::to_string(s.stage);
  }
  throw std::logic_error("bad phase");
}

Engine::Engine(Scenario scenario) : scenario_(std::move(scenario)) { scenario_.validate(); }

GameState Engine::new_game() const {
  GameState s;
  s.player = scenario_.start;
  s.ghost = scenario_.ghost_room;
  s.door = scenario_.door_room;
  return s;
}

std::optional<Room> Engine::destination(Room player, const Command& cmd) const {
  if (cmd.is_direction()) return step(player, cmd.direction());
  if (adjacent(player, cmd.target())) return cmd.target();
  return std::nullopt;
}

bool Engine::is_legal(const GameState& state, const Command& cmd) const {
  return destination(state.player, cmd).has_value();
}

std::vector<Command> Engine::legal_commands(const GameState& state, CommandForm form) const {
  std::vector<Command> out;
  if (form == CommandForm::Directions) {
    for (Direction d : kAllDirections) {
      if (step(state.player, d)) out.emplace_back(d);
    }
  } else {
    for (Room r : kAllRooms) {
      if (adjacent(state.player, r)) out.emplace_back(r);
    }
  }
  return out;
}

StepResult Engine::apply(const GameState& state, const Command& cmd) const {
  if (state.status != Status::InProgress) {
    throw TerminalState("the game is over (" + to_string(state.status) + ")");
  }
  StepResult out{state, {}};
  GameState& s = out.state;
  std::vector<ClueId>& clues = out.feedback.clues;

  if (auto dest = destination(s.player, cmd); !dest) {
    clues.push_back(ClueId::C2);
  } else {
    const Room from = s.player;
    const Room entered = *dest;
    s.player = entered;

    if (entered == s.ghost) {
      clues.push_back(ClueId::C11);
      s.status = Status::GhostDeath;
    } else {
      const auto& events = scenario_.events;
      if (s.phase == Phase::Endgame && s.stage < static_cast<int>(events.size())) {
        const GhostEvent& ev = events[s.stage];
        if (ev.trigger.matches(from, entered)) {
          s.ghost = ev.ghost_to;
          ++s.stage;
          clues.push_back(ev.clue);
          if (s.ghost == entered) {
            clues.push_back(ClueId::C11);
            s.status = Status::GhostDeath;
          }
        }
      }

      if (s.status == Status::InProgress) {
        if (s.phase == Phase::Searching && entered == scenario_.key_room) {
          clues.push_back(ClueId::C5);
          s.has_key = true;
          s.phase = Phase::Returning;
        } else if (s.phase == Phase::Returning && entered == s.door) {
          clues.push_back(ClueId::C6);
          s.door = max_distance_room(entered);
          s.phase = Phase::Endgame;
          s.stage = 0;
        } else if (s.phase == Phase::Endgame && s.stage == static_cast<int>(events.size()) &&
                   entered == s.door) {
          clues.push_back(ClueId::C10);
          s.status = Status::Escaped;
        }
      }

      if (clues.empty()) {
        if (s.phase == Phase::Searching) {
          if (adjacent(entered, s.ghost)) clues.push_back(ClueId::C3);
          if (adjacent(entered, scenario_.key_room)) clues.push_back(ClueId::C4);
        }
        if (clues.empty()) clues.push_back(ClueId::C1);
      }
    }
  }

  ++s.moves_used;
  if (s.moves_used >= scenario_.move_limit && s.status == Status::InProgress) {
    s.status = Status::OutOfMoves;
    clues.push_back(ClueId::C12);
  }
  if (s.status != Status::InProgress) out.feedback.terminal = s.status;
  return out;
}

}  // namespace haunted
