#include "haunted/analyzer.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

namespace haunted {

namespace {

std::optional<Room> destination(Room from, const Command& cmd) {
  if (cmd.is_direction()) return step(from, cmd.direction());
  if (adjacent(from, cmd.target())) return cmd.target();
  return std::nullopt;
}

/// Observed clues without the out-of-moves notice, which carries no
/// information about the room.
std::vector<ClueId> room_clues(const MoveRecord& m) {
  std::vector<ClueId> out;
  for (ClueId c : m.clue_ids) {
    if (c != ClueId::C12) out.push_back(c);
  }
  return out;
}

bool walls_consistent(Room start, std::span<const MoveRecord> history, Room& current) {
  current = start;
  for (const MoveRecord& m : history) {
    auto dest = destination(current, m.command);
    if (dest.has_value() != m.legal) return false;
    if (dest) current = *dest;
  }
  return true;
}

// Shifts announced by the ghost event clues.
std::optional<Room> shift(Room r, int dcol, int drow) {
  int c = r.column_index() + dcol;
  int row = r.row() + drow;
  if (c < 0 || c > 2 || row < 1 || row > 3) return std::nullopt;
  return Room(static_cast<Column>(c), row);
}

/// Checks whether start/ghost/key explain every clue in the history under
/// the game's clue rules. Event timing is taken from the observations.
bool clues_consistent(Room start, Room ghost, Room key, std::span<const MoveRecord> history) {
  enum class P { Searching, Returning, Endgame } phase = P::Searching;
  Room current = start;
  Room door = start;
  int events_seen = 0;
  using V = std::vector<ClueId>;

  for (const MoveRecord& m : history) {
    const V clues = room_clues(m);
    auto dest = destination(current, m.command);
    if (dest.has_value() != m.legal) return false;
    if (!dest) {
      if (clues != V{ClueId::C2}) return false;
      continue;
    }
    current = *dest;
    if (current == ghost) {
      if (clues != V{ClueId::C11}) return false;
      continue;
    }
    switch (phase) {
      case P::Searching: {
        if (current == key) {
          if (clues != V{ClueId::C5}) return false;
          phase = P::Returning;
          break;
        }
        V expected;
        if (adjacent(current, ghost)) expected.push_back(ClueId::C3);
        if (adjacent(current, key)) expected.push_back(ClueId::C4);
        if (expected.empty()) expected.push_back(ClueId::C1);
        if (clues != expected) return false;
        break;
      }
      case P::Returning:
        if (current == door) {
          if (clues != V{ClueId::C6}) return false;
          try {
            door = max_distance_room(current);
          } catch (const AmbiguousTarget&) {
            return false;
          }
          phase = P::Endgame;
        } else if (clues != V{ClueId::C1}) {
          return false;
        }
        break;
      case P::Endgame: {
        if (clues.empty()) return false;
        const ClueId first = clues.front();
        if (first == ClueId::C7 || first == ClueId::C8 || first == ClueId::C9) {
          auto moved = first == ClueId::C7   ? shift(ghost, 0, 1)
                       : first == ClueId::C8 ? shift(ghost, -1, 0)
                                             : shift(ghost, 2, 0);
          if (!moved) return false;
          ghost = *moved;
          ++events_seen;
          const V expected = ghost == current ? V{first, ClueId::C11} : V{first};
          if (clues != expected) return false;
        } else if (first == ClueId::C10) {
          if (clues.size() != 1 || events_seen < 3 || current != door) return false;
        } else {
          if (clues != V{ClueId::C1}) return false;
          if (events_seen >= 3 && current == door) return false;
        }
        break;
      }
    }
  }
  return true;
}

}  // namespace

std::string to_string(BeliefMode m) { return m == BeliefMode::WallsOnly ? "walls" : "clues"; }

BeliefMode parse_belief_mode(std::string_view text) {
  if (text == "walls") return BeliefMode::WallsOnly;
  if (text == "clues") return BeliefMode::ClueAugmented;
  throw std::invalid_argument("unknown belief mode: " + std::string(text));
}

std::set<Room> BeliefState::currents() const {
  std::set<Room> out;
  for (const auto& [s, c] : candidates) out.insert(c);
  return out;
}

std::set<Room> BeliefState::starts() const {
  std::set<Room> out;
  for (const auto& [s, c] : candidates) out.insert(s);
  return out;
}

std::optional<Room> BeliefState::known_room() const {
  auto cs = currents();
  if (cs.size() == 1) return *cs.begin();
  return std::nullopt;
}

BeliefState belief(std::span<const MoveRecord> history, BeliefMode mode) {
  BeliefState b;
  b.mode = mode;
  for (Room start : kAllRooms) {
    Room current = start;
    if (!walls_consistent(start, history, current)) continue;
    if (mode == BeliefMode::ClueAugmented) {
      bool explained = false;
      for (Room ghost : kAllRooms) {
        for (Room key : kAllRooms) {
          if (ghost == start || key == start || ghost == key) continue;
          if (clues_consistent(start, ghost, key, history)) {
            explained = true;
            break;
          }
        }
        if (explained) break;
      }
      if (!explained) continue;
    }
    b.candidates.emplace(start, current);
  }
  if (b.candidates.empty()) {
    throw InconsistentHistory("no start room is consistent with " + std::to_string(history.size()) +
                              " observed moves");
  }
  return b;
}

std::string error_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::SelfLocation: return "E1";
    case ErrorKind::GuessFromB1: return "E2a";
    case ErrorKind::GuessFromC2: return "E2b";
    case ErrorKind::IgnoredEvidence: return "E2c";
    case ErrorKind::GhostTracking: return "E3";
  }
  throw std::logic_error("bad error kind");
}

std::string error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SelfLocation: return "Failure to locate oneself";
    case ErrorKind::GuessFromB1: return "Random guess from B1";
    case ErrorKind::GuessFromC2: return "High-risk move from C2";
    case ErrorKind::IgnoredEvidence: return "Ignored key/ghost evidence";
    case ErrorKind::GhostTracking: return "Not tracking the ghost";
  }
  throw std::logic_error("bad error kind");
}

std::vector<ErrorInstance> detect_errors(const Transcript& t, BeliefMode mode) {
  using namespace rooms;
  const Scenario scenario = Scenario::canonical();
  std::vector<ErrorInstance> out;

  Room current = scenario.start;
  Room arrived_from = scenario.start;
  Room ghost = scenario.ghost_room;
  std::set<Room> visited{scenario.start};
  bool has_key = false;
  bool door_moved = false;

  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    const MoveRecord& m = t.moves[i];
    const std::string cmd = format_command(m.command);

    if (!m.legal) {
      // Judged only on what was observable before this move.
      std::span<const MoveRecord> before(t.moves.data(), i);
      try {
        if (auto known = belief(before, mode).known_room()) {
          if (!destination(*known, m.command)) {
            out.push_back({ErrorKind::SelfLocation, m.index,
                           "'" + cmd + "' is impossible from " + format_room(*known) +
                               ", which the earlier moves had pinned down"});
          }
        }
      } catch (const InconsistentHistory&) {
      }
    } else {
      const Room to = m.player_after;
      if (!has_key) {
        if (current == B1 && !visited.contains(C2) && (to == A1 || to == B2)) {
          out.push_back({ErrorKind::GuessFromB1, m.index,
                         "B1 -> " + format_room(to) + " without having visited C2"});
        }
        if (current == C2 && arrived_from == C1 && !visited.contains(B1) && (to == B2 || to == C3)) {
          out.push_back({ErrorKind::GuessFromC2, m.index,
                         "C1 -> C2 -> " + format_room(to) + " without having visited B1"});
        }
        if (visited.contains(B1) && visited.contains(C2) && to == B2) {
          out.push_back({ErrorKind::IgnoredEvidence, m.index,
                         "entered B2 after visiting both B1 and C2"});
        }
      }
      if (door_moved && to == ghost) {
        out.push_back({ErrorKind::GhostTracking, m.index,
                       "entered " + format_room(to) + " where the ghost was"});
      }
      arrived_from = current;
      current = to;
      visited.insert(to);
    }

    ghost = m.ghost_after;
    for (ClueId c : m.clue_ids) {
      if (c == ClueId::C5) has_key = true;
      if (c == ClueId::C6) door_moved = true;
    }
  }
  return out;
}

SubObjectiveFlags detect_subobjectives(const Transcript& t) {
  SubObjectiveFlags f;
  f.found_key = t.has_clue(ClueId::C5);
  f.returned_c1 = t.has_clue(ClueId::C6);
  f.reached_a2 = t.has_clue(ClueId::C8);
  f.avoided_a3 = t.has_clue(ClueId::C9);
  f.escaped = t.outcome.status == OutcomeStatus::Escaped;
  return f;
}

AnalysisReport aggregate(std::span<const Transcript> ts, std::span<const std::string> group_labels,
                         BeliefMode mode) {
  if (!group_labels.empty() && group_labels.size() != ts.size()) {
    throw std::invalid_argument("group labels must match the transcript count");
  }
  AnalysisReport report;
  report.mode = mode;
  std::map<std::string, std::size_t> group_index;

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Transcript& t = ts[i];
    TranscriptAnalysis a;
    a.session_id = t.session_id;
    a.group = group_labels.empty() ? t.agent.label() : group_labels[i];
    a.status = t.outcome.status;
    a.flags = detect_subobjectives(t);
    a.errors = detect_errors(t, mode);

    auto [it, fresh] = group_index.emplace(a.group, report.groups.size());
    if (fresh) report.groups.push_back(GroupSummary{a.group});
    GroupSummary& g = report.groups[it->second];

    if (t.outcome.status == OutcomeStatus::Invalid) {
      ++g.invalid;
    } else {
      ++g.n;
      const std::array<bool, 5> flags = {a.flags.found_key, a.flags.returned_c1, a.flags.reached_a2,
                                         a.flags.avoided_a3, a.flags.escaped};
      for (std::size_t k = 0; k < flags.size(); ++k) g.subobjectives[k] += flags[k] ? 1 : 0;
      g.passes += a.flags.escaped ? 1 : 0;
      for (std::size_t k = 0; k < kAllErrorKinds.size(); ++k) {
        const auto count = std::count_if(a.errors.begin(), a.errors.end(), [&](const ErrorInstance& e) {
          return e.kind == kAllErrorKinds[k];
        });
        g.error_instances[k] += static_cast<int>(count);
        g.error_participants[k] += count > 0 ? 1 : 0;
      }
    }
    report.transcripts.push_back(std::move(a));
  }
  return report;
}

std::string format_count(int count, int n) {
  if (count == 0 || n <= 0) return std::to_string(count);
  const long long pct = (200LL * count + n) / (2LL * n);
  return std::to_string(count) + " (" + std::to_string(pct) + "%)";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format: " + std::string(text));
}

namespace {

const std::array<const char*, 5> kSubObjectiveNames = {"Find the key", "Move back to C1", "Move to A2",
                                                       "Avoid A3", "Escaped"};
const std::array<const char*, 5> kSubObjectiveKeys = {"found_key", "returned_c1", "reached_a2",
                                                      "avoided_a3", "escaped"};

std::string render_text(const AnalysisReport& r) {
  std::ostringstream out;
  out << "Belief mode: " << (r.mode == BeliefMode::WallsOnly ? "walls-only" : "clue-augmented") << "\n\n";

  std::size_t width = 12;
  for (const auto& g : r.groups) width = std::max(width, g.group.size() + 2);

  out << std::left << std::setw(static_cast<int>(width)) << "Group" << std::setw(6) << "n"
      << std::setw(10) << "Pass";
  for (std::size_t k = 0; k < 4; ++k) out << std::setw(18) << kSubObjectiveNames[k];
  out << "Invalid\n";
  for (const auto& g : r.groups) {
    out << std::setw(static_cast<int>(width)) << g.group << std::setw(6) << g.n << std::setw(10)
        << format_count(g.passes, g.n);
    for (std::size_t k = 0; k < 4; ++k) out << std::setw(18) << format_count(g.subobjectives[k], g.n);
    out << g.invalid << "\n";
  }

  out << "\nErrors (participants, instances)\n";
  out << std::setw(static_cast<int>(width)) << "Group";
  for (ErrorKind k : kAllErrorKinds) out << std::setw(18) << error_code(k);
  out << "\n";
  for (const auto& g : r.groups) {
    out << std::setw(static_cast<int>(width)) << g.group;
    for (std::size_t k = 0; k < kAllErrorKinds.size(); ++k) {
      out << std::setw(18)
          << (format_count(g.error_participants[k], g.n) + ", " + std::to_string(g.error_instances[k]));
    }
    out << "\n";
  }
  out << "\nE1 " << error_name(ErrorKind::SelfLocation) << "; E2a " << error_name(ErrorKind::GuessFromB1)
      << "; E2b " << error_name(ErrorKind::GuessFromC2) << "; E2c " << error_name(ErrorKind::IgnoredEvidence)
      << "; E3 " << error_name(ErrorKind::GhostTracking) << "\n";
  return out.str();
}

std::string percent(int count, int n) {
  if (n <= 0) return "";
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << 100.0 * count / n;
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const AnalysisReport& r) {
  std::ostringstream out;
  out << "group,metric,count,n,percent,instances\n";
  for (const auto& g : r.groups) {
    const std::string name = csv_field(g.group);
    out << name << ",pass," << g.passes << "," << g.n << "," << percent(g.passes, g.n) << ",\n";
    for (std::size_t k = 0; k < 4; ++k) {
      out << name << "," << kSubObjectiveKeys[k] << "," << g.subobjectives[k] << "," << g.n << ","
          << percent(g.subobjectives[k], g.n) << ",\n";
    }
    out << name << ",invalid," << g.invalid << "," << g.n << ",,\n";
    for (std::size_t k = 0; k < kAllErrorKinds.size(); ++k) {
      out << name << ",error_" << error_code(kAllErrorKinds[k]) << "," << g.error_participants[k] << ","
          << g.n << "," << percent(g.error_participants[k], g.n) << "," << g.error_instances[k] << "\n";
    }
  }
  return out.str();
}

}  // namespace

nlohmann::json to_json(const AnalysisReport& r) {
  using nlohmann::json;
  json groups = json::array();
  for (const auto& g : r.groups) {
    json sub, errors;
    for (std::size_t k = 0; k < 5; ++k) sub[kSubObjectiveKeys[k]] = g.subobjectives[k];
    for (std::size_t k = 0; k < kAllErrorKinds.size(); ++k) {
      errors[error_code(kAllErrorKinds[k])] = {{"participants", g.error_participants[k]},
                                               {"instances", g.error_instances[k]}};
    }
    groups.push_back({{"group", g.group},
                      {"n", g.n},
                      {"invalid", g.invalid},
                      {"passes", g.passes},
                      {"subobjectives", std::move(sub)},
                      {"errors", std::move(errors)}});
  }
  json transcripts = json::array();
  for (const auto& a : r.transcripts) {
    json errs = json::array();
    for (const auto& e : a.errors) {
      errs.push_back({{"kind", error_code(e.kind)}, {"move_index", e.move_index}, {"evidence", e.evidence}});
    }
    transcripts.push_back({{"session_id", a.session_id},
                           {"group", a.group},
                           {"status", to_string(a.status)},
                           {"subobjectives", a.flags},
                           {"errors", std::move(errs)}});
  }
  return json{{"belief_mode", to_string(r.mode)}, {"groups", std::move(groups)}, {"transcripts", std::move(transcripts)}};
}

std::string render(const AnalysisReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: return render_text(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return to_json(report).dump(2) + "\n";
  }
  throw std::logic_error("bad report format");
}

}  // namespace haunted
